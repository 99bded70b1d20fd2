import json

import numpy as np
import pytest

from qinstr.cli import main
from qinstr.instruments import instruments_close
from qinstr.observables import observables_close
from qinstr.serialize import load_document, save_document

from conftest import P0, P1, P_PLUS, P_MINUS
from qinstr.observables import Observable


def run(argv):
    return main(argv)


@pytest.fixture
def z_files(tmp_path):
    sharp_z = Observable({"0": P0, "1": P1})
    sharp_x = Observable({"+": P_PLUS, "-": P_MINUS})
    z_path = tmp_path / "z.json"
    x_path = tmp_path / "x.json"
    mixed_path = tmp_path / "mixed.json"
    save_document(sharp_z, str(z_path))
    save_document(sharp_x, str(x_path))
    save_document(0.5 * np.eye(2, dtype=complex), str(mixed_path), kind="state")
    return z_path, x_path, mixed_path


class TestVerifyCommand:
    def test_selected_suite_passes(self, capsys):
        assert run(["verify", "--suite", "thm-2.1", "--seed", "42"]) == 0
        out = capsys.readouterr().out
        assert "thm-2.1: pass" in out

    def test_unknown_suite_is_usage_error(self, capsys):
        assert run(["verify", "--suite", "thm-9.9"]) == 2

    def test_probe_reports_unknown_without_failing(self, capsys):
        assert run(["verify", "--suite", "conj-2.5-converse", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "unknown" in out and "no counterexample" in out

    def test_reproducible_output(self, capsys):
        run(["verify", "--suite", "lem-3.4", "--seed", "7"])
        first = capsys.readouterr().out
        run(["verify", "--suite", "lem-3.4", "--seed", "7"])
        second = capsys.readouterr().out
        assert first == second

    def test_tolerance_scaling_env(self, capsys, monkeypatch):
        monkeypatch.setenv("QINSTR_TOL", "1000.0")
        assert run(["verify", "--suite", "ex-8", "--seed", "3"]) == 0
        monkeypatch.delenv("QINSTR_TOL")


class TestComputeCommand:
    def test_k_map_then_j_map_round_trip(self, tmp_path, z_files):
        z_path, _, _ = z_files
        instr_path = tmp_path / "lz.json"
        obs_path = tmp_path / "back.json"
        assert run(["compute", "k-map", str(z_path), "-o", str(instr_path)]) == 0
        assert run(["compute", "j-map", str(instr_path), "-o", str(obs_path)]) == 0
        back = load_document(str(obs_path)).obj
        z = load_document(str(z_path)).obj
        assert observables_close(back, z, 1e-9)

    def test_joint_prob_complementary_quarter(self, tmp_path, z_files):
        z_path, x_path, mixed_path = z_files
        out = tmp_path / "p.json"
        assert (
            run(
                [
                    "compute",
                    "joint-prob",
                    str(mixed_path),
                    str(z_path),
                    "0",
                    str(x_path),
                    "+",
                    "-o",
                    str(out),
                ]
            )
            == 0
        )
        doc = load_document(str(out))
        assert doc.kind == "scalar"
        assert doc.obj == pytest.approx(0.25, abs=1e-10)

    def test_dilate_then_model_round_trip(self, tmp_path, rng):
        from qinstr.rand import random_instrument

        instr = random_instrument(2, 2, rng)
        instr_path = tmp_path / "instr.json"
        fimm_path = tmp_path / "fimm.json"
        back_path = tmp_path / "back.json"
        save_document(instr, str(instr_path))
        assert run(["compute", "dilate", str(instr_path), "-o", str(fimm_path)]) == 0
        assert run(["compute", "model-instr", str(fimm_path), "-o", str(back_path)]) == 0
        back = load_document(str(back_path)).obj
        assert instruments_close(back, instr, 1e-7)

    def test_seq_product_effects(self, tmp_path):
        a_path, b_path, out = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "o.json"
        save_document(0.5 * np.eye(2, dtype=complex), str(a_path), kind="effect")
        save_document(P0, str(b_path), kind="effect")
        assert run(["compute", "seq-product", str(a_path), str(b_path), "-o", str(out)]) == 0
        got = load_document(str(out))
        assert got.kind == "effect"
        np.testing.assert_allclose(got.obj, 0.5 * P0, atol=1e-10)

    def test_conditioned_observables(self, tmp_path, z_files):
        z_path, x_path, _ = z_files
        out = tmp_path / "cond.json"
        assert run(["compute", "conditioned", str(z_path), str(x_path), "-o", str(out)]) == 0
        cond = load_document(str(out)).obj
        # conditioning on a complementary observable leaves complete noise
        for y in cond.labels:
            np.testing.assert_allclose(cond[y], 0.5 * np.eye(2), atol=1e-9)

    def test_convex_mixture(self, tmp_path, z_files):
        z_path, _, _ = z_files
        out = tmp_path / "mix.json"
        assert run(["compute", "convex", "0.5,0.5", str(z_path), str(z_path), "-o", str(out)]) == 0
        mixed = load_document(str(out)).obj
        z = load_document(str(z_path)).obj
        assert observables_close(mixed, z, 1e-10)

    def test_post_process_and_product_instr(self, tmp_path, z_files, rng):
        from qinstr.rand import random_stochastic
        from qinstr.instruments import luders_instrument

        z_path, _, _ = z_files
        z = load_document(str(z_path)).obj
        nu_path, out1 = tmp_path / "nu.json", tmp_path / "post.json"
        save_document(random_stochastic(["0", "1"], ["p", "q"], rng), str(nu_path))
        assert run(["compute", "post-process", str(nu_path), str(z_path), "-o", str(out1)]) == 0
        assert load_document(str(out1)).kind == "observable"

        instr_path, out2 = tmp_path / "lz.json", tmp_path / "prod.json"
        save_document(luders_instrument(z), str(instr_path))
        assert run(["compute", "product-instr", str(instr_path), str(instr_path), "-o", str(out2)]) == 0
        prod = load_document(str(out2))
        assert prod.kind == "instrument" and len(prod.obj) == 4

    def test_kind_mismatch_usage_error(self, tmp_path, z_files, capsys):
        z_path, _, mixed_path = z_files
        assert run(["compute", "j-map", str(z_path), "-o", str(tmp_path / "x.json")]) == 2

    def test_wrong_arity(self, tmp_path, z_files):
        z_path, x_path, _ = z_files
        assert run(["compute", "j-map", str(z_path), str(x_path), "-o", str(tmp_path / "x.json")]) == 2

    def test_invalid_input_document_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "state", "dim": 2, "matrix": [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}')
        assert run(["compute", "j-map", str(bad), "-o", str(tmp_path / "x.json")]) == 3


class TestRandomCommand:
    @pytest.mark.parametrize("kind", ["effect", "state", "observable", "instrument", "fimm", "stochastic"])
    def test_generates_valid_documents(self, tmp_path, kind):
        out = tmp_path / f"{kind}.json"
        assert run(["random", kind, "--dim", "3", "--outcomes", "2", "--seed", "5", "-o", str(out)]) == 0
        doc = load_document(str(out))
        assert doc.kind == kind

    def test_deterministic_per_seed(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        run(["random", "observable", "--dim", "3", "--outcomes", "4", "--seed", "11", "-o", str(out1)])
        run(["random", "observable", "--dim", "3", "--outcomes", "4", "--seed", "11", "-o", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        run(["random", "state", "--dim", "2", "--seed", "1", "-o", str(out1)])
        run(["random", "state", "--dim", "2", "--seed", "2", "-o", str(out2)])
        assert out1.read_bytes() != out2.read_bytes()

    def test_dim_range_enforced(self, tmp_path):
        assert run(["random", "state", "--dim", "9", "--seed", "0", "-o", str(tmp_path / "x.json")]) == 2
        assert run(["random", "observable", "--dim", "2", "--outcomes", "9", "--seed", "0", "-o", str(tmp_path / "y.json")]) == 2


class TestValidateCommand:
    def test_valid_document(self, tmp_path, z_files, capsys):
        z_path, _, _ = z_files
        assert run(["validate", str(z_path)]) == 0
        assert "valid observable" in capsys.readouterr().out

    def test_invariant_violation_exit_code(self, tmp_path, capsys):
        payload = {
            "kind": "observable",
            "dim": 2,
            "labels": ["0", "1"],
            "effects": {
                "0": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                "1": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.9, 0.0]]],
            },
        }
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(payload))
        assert run(["validate", str(bad)]) == 3
        err = capsys.readouterr().err
        assert "sum-to-identity" in err and "0.1" in err
