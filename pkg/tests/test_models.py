import numpy as np
import pytest

from qinstr.errors import DimensionError, NotCommutative, NotNormal
from qinstr.instruments import (
    Operation,
    induced_observable,
    instr_channel,
    instr_coexist_verify,
    instruments_close,
    luders_instrument,
    kraus_instrument,
    operations_close,
    trivial_instrument,
)
from qinstr.linalg import frob, tensor_product
from qinstr.models import (
    FIMM,
    VonNeumannModel,
    dilate_instrument,
    luders_positivity_check,
    marginal_instruments,
    model_instrument,
    normal_fimm_kraus_extract,
    simultaneous_fimms,
    swap_unitary,
    trivial_fimm,
    vn_measured,
    vn_model_for_commutative,
    von_neumann_unitary,
)
from qinstr.observables import (
    Observable,
    atomic_observable,
    classify_observable,
    combine_labels,
    identity_observable,
    observables_close,
)
from qinstr.rand import (
    random_fimm,
    random_instrument,
    random_kraus_instrument,
    random_observable,
    random_pure_state_vector,
    random_state,
    random_unitary,
)

from conftest import P0, P1, PAULI_X, proj


class TestSwapUnitary:
    def test_dim_one(self):
        np.testing.assert_allclose(swap_unitary(1), np.eye(1))

    def test_dim_two_permutation(self):
        u = swap_unitary(2)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 1.0
        expected[1, 2] = expected[2, 1] = 1.0
        np.testing.assert_allclose(u, expected)

    def test_conjugation_swaps_factors(self, rng):
        u = swap_unitary(3)
        rho, eta = random_state(3, rng), random_state(3, rng)
        lhs = u @ tensor_product(rho, eta) @ u.conj().T
        np.testing.assert_allclose(lhs, tensor_product(eta, rho), atol=1e-10)


class TestModelInstrument:
    def test_identity_interaction(self, rng):
        # with no interaction the pointer just reads the probe state
        d = 2
        eta = random_state(d, rng)
        pointer = random_observable(d, 2, rng)
        m = FIMM(d, d, eta, np.eye(d * d, dtype=complex), pointer)
        instr = model_instrument(m)
        for x in pointer.labels:
            w = float(np.trace(eta @ pointer[x]).real)
            assert operations_close(instr[x], Operation.from_choi(w * Operation.identity(d).choi), 1e-9)

    def test_factorized_interaction_scales_a_channel(self, rng):
        # a product interaction makes every outcome a multiple of the base
        # channel, with an identity measured observable
        d = 2
        u1, u2 = random_unitary(d, rng), random_unitary(d, rng)
        m = FIMM(
            d,
            d,
            random_state(d, rng),
            tensor_product(u1, u2),
            random_observable(d, 2, rng),
        )
        instr = model_instrument(m)
        base_channel = Operation.from_unitary(u1)
        eta_out = u2 @ m.probe_state @ u2.conj().T
        for x in m.pointer.labels:
            w = float(np.trace(eta_out @ m.pointer[x]).real)
            assert operations_close(instr[x], Operation.from_choi(w * base_channel.choi), 1e-9)
        assert classify_observable(induced_observable(instr)).identity

    def test_random_models_give_valid_instruments(self, rng):
        for t in range(5):
            m = random_fimm(2, 2 + t % 2, 2 + t % 2, rng)
            instr = model_instrument(m)
            total = sum(op.induced_effect for _, op in instr.items())
            assert frob(total - np.eye(2)) < 1e-7

    def test_probability_reproduction(self, rng):
        m = random_fimm(2, 3, 2, rng)
        instr = model_instrument(m)
        for _ in range(5):
            rho = random_state(2, rng)
            evolved = m.apply_interaction(tensor_product(rho, m.probe_state))
            for x in m.pointer.labels:
                lhs = np.trace(instr[x].apply(rho)).real
                rhs = np.trace(evolved @ tensor_product(np.eye(2), m.pointer[x])).real
                assert abs(lhs - rhs) < 1e-9


class TestTrivialFimm:
    def test_single_outcome_constant_channel(self, rng):
        eta = random_state(2, rng)
        m = trivial_fimm(eta, Observable({"0": np.eye(2)}))
        instr = model_instrument(m)
        rho = random_state(2, rng)
        np.testing.assert_allclose(instr["0"].apply(rho), eta, atol=1e-9)

    def test_qubit_pointer_z(self, rng, sharp_z):
        m = trivial_fimm(P0, sharp_z)
        instr = model_instrument(m)
        rho = random_state(2, rng)
        for x in ("0", "1"):
            expected = np.trace(rho @ sharp_z[x]) * P0
            assert frob(instr[x].apply(rho) - expected) < 1e-9

    def test_round_trip_with_trivial_instrument(self, rng):
        a = random_observable(2, 3, rng)
        alpha = random_state(2, rng)
        instr = trivial_instrument(a, alpha)
        measured = model_instrument(trivial_fimm(alpha, a))
        assert instruments_close(measured, instr, 1e-8)


class TestVonNeumannUnitary:
    def test_dim_one(self):
        np.testing.assert_allclose(von_neumann_unitary(np.eye(1), np.eye(1)), np.eye(1))

    def test_dim_two_standard_basis(self):
        u = von_neumann_unitary(np.eye(2), np.eye(2))
        e = np.eye(4)
        # basis images: |0,0> -> |0,0>, |1,0> -> |1,1>, |1,1> -> |1,0>, |0,1> -> |0,1>
        np.testing.assert_allclose(u @ e[:, 0], e[:, 0], atol=1e-12)
        np.testing.assert_allclose(u @ e[:, 2], e[:, 3], atol=1e-12)
        np.testing.assert_allclose(u @ e[:, 3], e[:, 2], atol=1e-12)
        np.testing.assert_allclose(u @ e[:, 1], e[:, 1], atol=1e-12)

    def test_involution(self, rng):
        base, probe = random_unitary(3, rng), random_unitary(3, rng)
        u = von_neumann_unitary(base, probe)
        np.testing.assert_allclose(u @ u, np.eye(9), atol=1e-9)

    def test_pairing_property(self, rng):
        base, probe = random_unitary(3, rng), random_unitary(3, rng)
        u = von_neumann_unitary(base, probe)
        for i in range(3):
            got = u @ np.kron(base[:, i], probe[:, 0])
            np.testing.assert_allclose(got, np.kron(base[:, i], probe[:, i]), atol=1e-9)


class TestVnMeasured:
    def test_atomic_pointer_measures_sharp_base(self, rng):
        base, probe = random_unitary(2, rng), random_unitary(2, rng)
        pointer = atomic_observable(probe, labels=["0", "1"])
        model = VonNeumannModel(base, probe, pointer)
        _, _, obs = vn_measured(model)
        for j, x in enumerate(pointer.labels):
            np.testing.assert_allclose(obs[x], proj(base[:, j]), atol=1e-9)
        assert classify_observable(obs).sharp

    def test_identity_pointer_measures_identity(self, rng):
        base, probe = random_unitary(2, rng), random_unitary(2, rng)
        pointer = identity_observable({"0": 0.5, "1": 0.5}, 2)
        model = VonNeumannModel(base, probe, pointer)
        _, _, obs = vn_measured(model)
        assert classify_observable(obs).identity

    def test_biased_pointer_weights(self):
        pointer = Observable({"0": np.diag([0.75, 0.25]), "1": np.diag([0.25, 0.75])})
        model = VonNeumannModel(np.eye(2, dtype=complex), np.eye(2, dtype=complex), pointer)
        _, _, obs = vn_measured(model)
        np.testing.assert_allclose(obs["0"], 0.75 * P0 + 0.25 * P1, atol=1e-10)

    def test_matches_model_instrument(self, rng):
        for _ in range(5):
            d = 2
            model = VonNeumannModel(
                random_unitary(d, rng), random_unitary(d, rng), random_observable(d, 2, rng)
            )
            instr, channel, obs = vn_measured(model)
            direct = model_instrument(model.to_fimm())
            assert instruments_close(instr, direct, 1e-8)
            assert operations_close(instr_channel(direct), channel, 1e-8)
            assert observables_close(induced_observable(direct), obs, 1e-8)

    def test_channel_idempotent(self, rng):
        model = VonNeumannModel(random_unitary(3, rng), random_unitary(3, rng), random_observable(3, 2, rng))
        _, channel, _ = vn_measured(model)
        rho = random_state(3, rng)
        once = channel.apply(rho)
        np.testing.assert_allclose(channel.apply(once), once, atol=1e-9)


class TestVnModelForCommutative:
    def test_sharp_z_round_trip(self, sharp_z):
        model = vn_model_for_commutative(sharp_z)
        _, _, measured = vn_measured(model)
        assert observables_close(measured, sharp_z, 1e-8)
        assert classify_observable(model.pointer).sharp

    def test_identity_observable_round_trip(self):
        a = identity_observable({"0": 0.25, "1": 0.75}, 2)
        model = vn_model_for_commutative(a)
        _, _, measured = vn_measured(model)
        assert observables_close(measured, a, 1e-8)

    def test_commuting_diagonal_pair(self):
        a = Observable({"0": np.diag([0.7, 0.2]), "1": np.diag([0.3, 0.8])})
        model = vn_model_for_commutative(a)
        _, _, measured = vn_measured(model)
        assert observables_close(measured, a, 1e-8)

    def test_random_commutative_round_trip(self, rng):
        from qinstr.rand import random_commutative_observable

        for t in range(10):
            d = 2 + t % 2
            a = random_commutative_observable(d, 2 + t % 2, rng)
            model = vn_model_for_commutative(a, rng)
            _, _, measured = vn_measured(model)
            assert observables_close(measured, a, 1e-8)

    def test_noncommutative_rejected(self, rng):
        # two outcomes always commute (complements); three generally do not
        a = random_observable(2, 3, rng)
        assert not classify_observable(a).commutative
        with pytest.raises(NotCommutative):
            vn_model_for_commutative(a)


class TestDilation:
    def test_identity_channel_single_outcome(self):
        instr = kraus_instrument({"only": np.eye(2, dtype=complex)})
        m = dilate_instrument(instr)
        assert m.dim_probe == 1
        assert classify_observable(m.pointer).atomic
        assert instruments_close(model_instrument(m), instr, 1e-8)

    def test_luders_sharp_z(self, sharp_z):
        m = dilate_instrument(luders_instrument(sharp_z))
        assert m.dim_probe == 2
        assert classify_observable(m.pointer).atomic
        assert instruments_close(model_instrument(m), luders_instrument(sharp_z), 1e-8)

    def test_trivial_instrument_sharp_but_not_atomic(self):
        a = identity_observable({"0": 0.5, "1": 0.5}, 2)
        trivial = trivial_instrument(a, 0.5 * np.eye(2))
        for _, op in trivial.items():
            w = np.linalg.eigvalsh(op.choi)
            assert int(np.sum(w > 1e-8 * w[-1])) >= 2
        m = dilate_instrument(trivial)
        flags = classify_observable(m.pointer)
        assert flags.sharp and not flags.atomic
        assert instruments_close(model_instrument(m), trivial, 1e-7)

    def test_round_trip_random_instruments(self, rng):
        for t in range(6):
            d = 2 + t % 2
            instr = random_instrument(d, 2 + t % 3, rng)
            m = dilate_instrument(instr)
            assert instruments_close(model_instrument(m), instr, 1e-7)

    def test_round_trip_kraus_instruments(self, rng):
        for t in range(5):
            d = 2 + t % 2
            instr = random_kraus_instrument(d, 2 + t % 3, rng)
            m = dilate_instrument(instr)
            assert classify_observable(m.pointer).atomic
            assert instruments_close(model_instrument(m), instr, 1e-7)


class TestNormalExtract:
    def test_dilated_kraus_round_trip(self, rng):
        instr = random_kraus_instrument(2, 3, rng)
        m = dilate_instrument(instr)
        extracted = normal_fimm_kraus_extract(m)
        rho = random_state(2, rng)
        for x in instr.labels:
            s_orig = instr[x].kraus_ops()[0]
            s_new = extracted[x]
            assert frob(s_new.conj().T @ s_new - s_orig.conj().T @ s_orig) < 1e-8
            assert frob(s_new @ rho @ s_new.conj().T - instr[x].apply(rho)) < 1e-8

    def test_von_neumann_atomic_pointer_gives_base_projections(self, rng):
        base, probe = random_unitary(2, rng), random_unitary(2, rng)
        pointer = atomic_observable(probe, labels=["0", "1"])
        model = VonNeumannModel(base, probe, pointer)
        ops = normal_fimm_kraus_extract(model.to_fimm())
        for j, x in enumerate(pointer.labels):
            s = ops[x]
            target = proj(base[:, j])
            assert frob(s.conj().T @ s - target) < 1e-9

    def test_swap_model_rank_one_operators(self, rng):
        h = random_pure_state_vector(2, rng)
        pointer = atomic_observable(np.eye(2, dtype=complex), labels=["0", "1"])
        m = trivial_fimm(proj(h), pointer)
        ops = normal_fimm_kraus_extract(m)
        for j, x in enumerate(pointer.labels):
            expected = np.outer(h, np.eye(2)[:, j].conj())
            # phase-invariant comparison
            assert frob(ops[x].conj().T @ ops[x] - expected.conj().T @ expected) < 1e-9
            assert np.linalg.matrix_rank(ops[x], tol=1e-9) == 1

    def test_non_atomic_pointer_rejected(self):
        a = identity_observable({"0": 0.5, "1": 0.5}, 2)
        trivial = trivial_instrument(a, 0.5 * np.eye(2))
        m = dilate_instrument(trivial)
        with pytest.raises(NotNormal):
            normal_fimm_kraus_extract(m)

    def test_mixed_probe_rejected(self, rng, sharp_z):
        m = dilate_instrument(luders_instrument(sharp_z))
        mixed = FIMM(2, 2, 0.5 * np.eye(2), m.interaction, m.pointer)
        with pytest.raises(NotNormal):
            normal_fimm_kraus_extract(mixed)


class TestLudersPositivity:
    def test_dilated_luders_passes(self, rng):
        a = random_observable(2, 2, rng)
        luders = luders_instrument(a)
        m = dilate_instrument(luders)
        assert luders_positivity_check(m)
        assert instruments_close(model_instrument(m), luders, 1e-8)

    def test_scaled_pauli_fails(self):
        instr = kraus_instrument(
            {"0": PAULI_X / np.sqrt(2.0), "1": np.eye(2, dtype=complex) / np.sqrt(2.0)}
        )
        m = dilate_instrument(instr)
        assert not luders_positivity_check(m)

    def test_identity_channel_passes(self):
        instr = kraus_instrument({"only": np.eye(2, dtype=complex)})
        assert luders_positivity_check(dilate_instrument(instr))


class TestSimultaneousFimms:
    def test_marginals_and_commuting_pointers(self, rng):
        base = random_instrument(2, 4, rng)
        labels = [combine_labels(str(x), str(y)) for x in range(2) for y in range(2)]
        from qinstr.instruments import Instrument

        joint = Instrument(dict(zip(labels, (op for _, op in base.items()))))
        i, j = marginal_instruments(joint)
        m1, m2 = simultaneous_fimms(joint)
        assert m1.sharp and m2.sharp
        for x in m1.pointer.labels:
            for y in m2.pointer.labels:
                assert frob(m1.pointer[x] @ m2.pointer[y] - m2.pointer[y] @ m1.pointer[x]) < 1e-10
        assert instruments_close(model_instrument(m1), i, 1e-7)
        assert instruments_close(model_instrument(m2), j, 1e-7)

    def test_trivial_joint_measures_trivial_instruments(self, rng):
        labels = [combine_labels(str(x), str(y)) for x in range(2) for y in range(2)]
        c = random_observable(2, 4, rng, labels=labels)
        alpha = random_state(2, rng)
        joint = trivial_instrument(c, alpha)
        i, j = marginal_instruments(joint)
        m1, m2 = simultaneous_fimms(joint)
        assert instruments_close(model_instrument(m1), i, 1e-7)
        assert instruments_close(model_instrument(m2), j, 1e-7)
        assert instr_coexist_verify(i, j, joint)

    def test_identity_joint(self):
        from qinstr.instruments import identity_instrument

        joint = identity_instrument(
            {("0", "0"): 0.06, ("0", "1"): 0.14, ("1", "0"): 0.24, ("1", "1"): 0.56}, 2
        )
        m1, m2 = simultaneous_fimms(joint)
        meas1 = model_instrument(m1)
        meas2 = model_instrument(m2)
        from qinstr.instruments import is_identity_instrument

        assert is_identity_instrument(meas1, 1e-7)
        assert is_identity_instrument(meas2, 1e-7)


class TestFimmValidation:
    def test_dims_checked(self, rng):
        with pytest.raises(DimensionError):
            FIMM(2, 3, random_state(2, rng), np.eye(6), random_observable(3, 2, rng))

    def test_sharp_flag(self, rng, sharp_z):
        m = trivial_fimm(random_state(2, rng), sharp_z)
        assert m.sharp
        m2 = trivial_fimm(random_state(2, rng), random_observable(2, 2, rng))
        assert not m2.sharp
