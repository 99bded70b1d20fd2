"""JSON documents for every domain object.

Complex scalars are stored as two-element ``[re, im]`` arrays and matrices
row-major.  Canonical output uses sorted keys and 17 significant digits, so
saving a loaded canonical file is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .effects import ensure_effect, ensure_state
from .errors import DocumentError, InvariantViolation, QinstrError
from .instruments import Instrument, Operation
from .linalg import Array
from .models import FIMM
from .observables import Label, Observable, StochasticMatrix, label_text, parse_label

KINDS = ("effect", "state", "observable", "instrument", "fimm", "stochastic", "scalar")


@dataclass(frozen=True)
class Document:
    """A loaded document: its kind tag, dimension, and domain object."""

    kind: str
    dim: int
    obj: object


# -- canonical JSON -----------------------------------------------------------


def _fmt_number(x: float) -> str:
    v = float(x)
    if v == 0.0:
        return "0"
    return format(v, ".17g")


def canonical_json(value: object) -> str:
    """Deterministic JSON text: sorted keys, 17-significant-digit floats."""
    if isinstance(value, Mapping):
        inner = ",".join(
            f"{json.dumps(str(k))}:{canonical_json(value[k])}" for k in sorted(value)
        )
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt_number(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise DocumentError(f"cannot serialize value of type {type(value).__name__}")


def encode_matrix(m: Array) -> list:
    a = np.asarray(m, dtype=complex)
    return [[[float(e.real), float(e.imag)] for e in row] for row in a]


def decode_matrix(data: object, what: str = "matrix") -> Array:
    if not isinstance(data, list) or not data:
        raise DocumentError(f"{what}: expected a nonempty list of rows")
    rows = []
    for row in data:
        if not isinstance(row, list):
            raise DocumentError(f"{what}: expected a list of rows")
        entries = []
        for e in row:
            if isinstance(e, (int, float)):
                entries.append(complex(e))
            elif isinstance(e, list) and len(e) == 2:
                entries.append(complex(float(e[0]), float(e[1])))
            else:
                raise DocumentError(f"{what}: entries must be numbers or [re, im] pairs")
        rows.append(entries)
    return np.asarray(rows, dtype=complex)


def decode_real_matrix(data: object, what: str = "matrix") -> np.ndarray:
    m = decode_matrix(data, what)
    if np.max(np.abs(m.imag), initial=0.0) > 0.0:
        raise DocumentError(f"{what}: expected real entries")
    return m.real


# -- encoders -----------------------------------------------------------------


def _observable_payload(obs: Observable) -> dict:
    return {
        "labels": [label_text(x) for x in obs.labels],
        "effects": {label_text(x): encode_matrix(e) for x, e in obs.items()},
    }


def document_dict(obj: object, kind: str | None = None) -> dict:
    """Document dictionary for a domain object; ``kind`` disambiguates bare
    matrices (effect vs state) and scalars."""
    if isinstance(obj, Observable):
        return {"kind": "observable", "dim": obj.dim, **_observable_payload(obj)}
    if isinstance(obj, Instrument):
        return {
            "kind": "instrument",
            "dim": obj.dim,
            "labels": [label_text(x) for x in obj.labels],
            "operations": {label_text(x): {"choi": encode_matrix(op.choi)} for x, op in obj.items()},
        }
    if isinstance(obj, FIMM):
        if isinstance(obj.interaction, Operation):
            interaction = {"choi": encode_matrix(obj.interaction.choi)}
        else:
            interaction = {"unitary": encode_matrix(obj.interaction)}
        return {
            "kind": "fimm",
            "dim": obj.dim_base,
            "dim_probe": obj.dim_probe,
            "probe_state": encode_matrix(obj.probe_state),
            "interaction": interaction,
            "pointer": _observable_payload(obj.pointer),
        }
    if isinstance(obj, StochasticMatrix):
        return {
            "kind": "stochastic",
            "dim": 0,
            "row_labels": [label_text(x) for x in obj.row_labels],
            "col_labels": [label_text(x) for x in obj.col_labels],
            "matrix": [[float(v) for v in row] for row in obj.matrix],
        }
    if isinstance(obj, (float, int)) and kind in (None, "scalar"):
        return {"kind": "scalar", "dim": 0, "value": float(obj)}
    if isinstance(obj, np.ndarray):
        if kind not in ("effect", "state"):
            raise DocumentError("bare matrices need an explicit kind ('effect' or 'state')")
        return {"kind": kind, "dim": int(obj.shape[0]), "matrix": encode_matrix(obj)}
    raise DocumentError(f"cannot serialize object of type {type(obj).__name__}")


def dumps_document(obj: object, kind: str | None = None) -> str:
    return canonical_json(document_dict(obj, kind)) + "\n"


def save_document(obj: object, path: str, kind: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_document(obj, kind))


# -- decoders -----------------------------------------------------------------


def _require(data: dict, key: str) -> object:
    if key not in data:
        raise DocumentError(f"missing field {key!r}")
    return data[key]


def _decode_labelled_effects(data: dict, what: str) -> dict[Label, Array]:
    labels = _require(data, "labels")
    effects = _require(data, "effects")
    if not isinstance(labels, list) or not isinstance(effects, dict):
        raise DocumentError(f"{what}: labels must be a list and effects a mapping")
    out: dict[Label, Array] = {}
    for text in labels:
        if text not in effects:
            raise DocumentError(f"{what}: no effect for label {text!r}")
        out[parse_label(text)] = decode_matrix(effects[text], f"{what}[{text}]")
    return out


def _load_observable(data: dict) -> Observable:
    return Observable(_decode_labelled_effects(data, "observable"))


def _load_instrument(data: dict) -> Instrument:
    labels = _require(data, "labels")
    operations = _require(data, "operations")
    if not isinstance(labels, list) or not isinstance(operations, dict):
        raise DocumentError("instrument: labels must be a list and operations a mapping")
    ops: dict[Label, Operation] = {}
    for text in labels:
        if text not in operations:
            raise DocumentError(f"instrument: no operation for label {text!r}")
        entry = operations[text]
        if not isinstance(entry, dict):
            raise DocumentError(f"instrument[{text}]: expected an object")
        if "kraus" in entry:
            mats = [decode_matrix(k, f"instrument[{text}].kraus") for k in entry["kraus"]]
            ops[parse_label(text)] = Operation.from_kraus(mats)
        elif "choi" in entry:
            ops[parse_label(text)] = Operation.from_choi(decode_matrix(entry["choi"], f"instrument[{text}].choi"))
        else:
            raise DocumentError(f"instrument[{text}]: needs 'choi' or 'kraus'")
    return Instrument(ops)


def _load_fimm(data: dict) -> FIMM:
    dim_base = int(_require(data, "dim"))
    dim_probe = int(_require(data, "dim_probe"))
    eta = decode_matrix(_require(data, "probe_state"), "probe_state")
    pointer = Observable(_decode_labelled_effects(_require(data, "pointer"), "pointer"))
    inter = _require(data, "interaction")
    if not isinstance(inter, dict):
        raise DocumentError("interaction: expected an object")
    if "unitary" in inter:
        interaction: object = decode_matrix(inter["unitary"], "interaction.unitary")
    elif "choi" in inter:
        interaction = Operation.from_choi(decode_matrix(inter["choi"], "interaction.choi"))
    else:
        raise DocumentError("interaction: needs 'unitary' or 'choi'")
    return FIMM(dim_base, dim_probe, eta, interaction, pointer)


def _load_stochastic(data: dict) -> StochasticMatrix:
    rows = _require(data, "row_labels")
    cols = _require(data, "col_labels")
    matrix = decode_real_matrix(_require(data, "matrix"), "stochastic matrix")
    return StochasticMatrix([parse_label(r) for r in rows], [parse_label(c) for c in cols], matrix)


def loads_document(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"parse error: {exc}") from exc
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"unknown kind {kind!r}; expected one of {KINDS}")
    try:
        if kind == "effect":
            obj: object = ensure_effect(decode_matrix(_require(data, "matrix")))
        elif kind == "state":
            obj = ensure_state(decode_matrix(_require(data, "matrix")))
        elif kind == "observable":
            obj = _load_observable(data)
        elif kind == "instrument":
            obj = _load_instrument(data)
        elif kind == "fimm":
            obj = _load_fimm(data)
        elif kind == "stochastic":
            obj = _load_stochastic(data)
        else:
            obj = float(_require(data, "value"))
    except InvariantViolation as exc:
        raise DocumentError(
            f"{exc.invariant}, residual {exc.residual:.6g}", exc.invariant, exc.residual
        ) from exc
    except DocumentError:
        raise
    except QinstrError as exc:
        raise DocumentError(str(exc)) from exc
    if kind in ("effect", "state"):
        dim = obj.shape[0]
    elif kind in ("observable", "instrument"):
        dim = obj.dim
    elif kind == "fimm":
        dim = obj.dim_base
    else:
        dim = 0
    declared = data.get("dim")
    if declared is not None and kind not in ("stochastic", "scalar") and int(declared) != dim:
        raise DocumentError(f"declared dim {declared} does not match content dim {dim}")
    return Document(kind, dim, obj)


def load_document(path: str) -> Document:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return loads_document(text)
