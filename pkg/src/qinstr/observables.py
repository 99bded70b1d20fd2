"""Finite observables and their combinators.

An observable is a finite, label-indexed family of effects summing to the
identity (a finite-outcome POVM).  Product value-spaces use tuple labels;
combining labels flattens, so a triple product carries labels ``(x, y, z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .effects import ensure_effect, ensure_state, seq_product
from .errors import (
    DimensionError,
    InvariantViolation,
    LabelError,
    ShapeError,
    WeightError,
)
from .linalg import Array, commutator_norm, frob, hermitian_part

Label = str | tuple[str, ...]

SUM_TOL = 1e-8
RANK_REL_TOL = 1e-8


def check_token(token: str) -> str:
    if not isinstance(token, str) or not token:
        raise LabelError(f"label token must be a nonempty string, got {token!r}")
    if "|" in token:
        raise LabelError(f"label token may not contain '|': {token!r}")
    return token


def check_label(label: Label) -> Label:
    if isinstance(label, tuple):
        if not label:
            raise LabelError("empty tuple label")
        return tuple(check_token(t) for t in label)
    return check_token(label)


def combine_labels(x: Label, y: Label) -> tuple[str, ...]:
    """Flattened product label, so nested products read as flat tuples."""
    xt = x if isinstance(x, tuple) else (x,)
    yt = y if isinstance(y, tuple) else (y,)
    return xt + yt


def label_text(label: Label) -> str:
    return "|".join(label) if isinstance(label, tuple) else label


def parse_label(text: str) -> Label:
    parts = text.split("|")
    return tuple(parts) if len(parts) > 1 else parts[0]


class Observable:
    """Ordered map from outcome labels to effects that sums to the identity."""

    def __init__(self, effects: Mapping[Label, object] | Iterable[tuple[Label, object]], sum_tol: float = SUM_TOL):
        items = list(effects.items()) if isinstance(effects, Mapping) else list(effects)
        if not items:
            raise LabelError("an observable needs at least one outcome")
        normalized: dict[Label, Array] = {}
        for label, matrix in items:
            label = check_label(label)
            if label in normalized:
                raise LabelError(f"duplicate label {label!r}")
            e = ensure_effect(matrix)
            e.setflags(write=False)
            normalized[label] = e
        dims = {e.shape[0] for e in normalized.values()}
        if len(dims) != 1:
            raise DimensionError(f"effects of mixed dimensions {sorted(dims)}")
        self.dim = dims.pop()
        total = sum(normalized.values())
        residual = frob(total - np.eye(self.dim))
        if residual > sum_tol:
            raise InvariantViolation("sum-to-identity", residual)
        self._effects = normalized

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(self._effects)

    def __len__(self) -> int:
        return len(self._effects)

    def __contains__(self, label: Label) -> bool:
        return label in self._effects

    def __getitem__(self, label: Label) -> Array:
        try:
            return self._effects[label]
        except KeyError:
            raise LabelError(f"unknown label {label!r}") from None

    def items(self):
        return self._effects.items()

    def __repr__(self) -> str:
        return f"Observable(dim={self.dim}, labels={list(self.labels)!r})"


def observables_close(a: Observable, b: Observable, tol: float) -> bool:
    if a.labels != b.labels or a.dim != b.dim:
        return False
    return all(frob(a[x] - b[x]) <= tol for x in a.labels)


class StochasticMatrix:
    """Row-stochastic matrix indexed by source and target labels."""

    def __init__(
        self,
        row_labels: Sequence[Label],
        col_labels: Sequence[Label],
        matrix: object,
        row_tol: float = 1e-10,
    ):
        self.row_labels = tuple(check_label(l) for l in row_labels)
        self.col_labels = tuple(check_label(l) for l in col_labels)
        m = np.asarray(matrix, dtype=float)
        if m.shape != (len(self.row_labels), len(self.col_labels)):
            raise ShapeError(f"matrix shape {m.shape} does not match label counts")
        if m.min(initial=0.0) < -1e-12:
            raise InvariantViolation("nonnegative-entries", float(-m.min()))
        m = np.clip(m, 0.0, None)
        row_residual = float(np.max(np.abs(m.sum(axis=1) - 1.0)))
        if row_residual > row_tol:
            raise InvariantViolation("row-sums-to-one", row_residual)
        m.setflags(write=False)
        self.matrix = m

    def value(self, src: Label, tgt: Label) -> float:
        try:
            i = self.row_labels.index(src)
            j = self.col_labels.index(tgt)
        except ValueError:
            raise LabelError(f"unknown label pair ({src!r}, {tgt!r})") from None
        return float(self.matrix[i, j])


@dataclass(frozen=True)
class ObservableFlags:
    identity: bool
    atomic: bool
    indecomposable: bool
    commutative: bool
    sharp: bool


def _effect_rank(e: Array) -> int:
    w = np.linalg.eigvalsh(e)
    top = float(w[-1])
    if top <= RANK_REL_TOL:
        return 0
    return int(np.sum(w > RANK_REL_TOL * top))


def _is_projection(e: Array, tol: float = SUM_TOL) -> bool:
    return frob(e @ e - e) <= tol


def obs_effect_of_subset(a: Observable, subset: Iterable[Label]) -> Array:
    """Effect of a set of outcomes, ``sum_{x in X} A_x``."""
    total = np.zeros((a.dim, a.dim), dtype=complex)
    for x in subset:
        total = total + a[x]
    return total


def obs_seq_product(a: Observable, b: Observable) -> Observable:
    """Observable of measuring ``a`` first and ``b`` second, on product labels."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    return Observable(
        {combine_labels(x, y): seq_product(ax, by) for x, ax in a.items() for y, by in b.items()}
    )


def obs_conditioned(a: Observable, b: Observable) -> Observable:
    """Observable ``b`` conditioned by ``a``: outcome ``y`` is ``sum_x A_x o B_y``."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    out: dict[Label, Array] = {}
    for y, by in b.items():
        total = np.zeros((a.dim, a.dim), dtype=complex)
        for _, ax in a.items():
            total = total + seq_product(ax, by)
        out[y] = total
    return Observable(out)


def check_weights(weights: Sequence[float], count: int, tol: float = 1e-10) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != count:
        raise WeightError(f"expected {count} weights, got shape {w.shape}")
    if w.min(initial=0.0) < -tol:
        raise WeightError(f"negative weight {w.min():.3g}")
    if abs(w.sum() - 1.0) > tol:
        raise WeightError(f"weights sum to {w.sum():.12g}, not 1")
    return np.clip(w, 0.0, None)


def obs_convex_combo(weights: Sequence[float], observables: Sequence[Observable]) -> Observable:
    """Outcome-wise mixture of observables sharing one value-space."""
    if not observables:
        raise WeightError("no observables given")
    w = check_weights(weights, len(observables))
    labels = observables[0].labels
    for o in observables[1:]:
        if o.labels != labels:
            raise LabelError("observables do not share a value-space")
        if o.dim != observables[0].dim:
            raise DimensionError("observables of mixed dimensions")
    return Observable(
        {x: sum(wi * o[x] for wi, o in zip(w, observables)) for x in labels}
    )


def obs_post_process(nu: StochasticMatrix, b: Observable) -> Observable:
    """Classical relabeling: outcome ``z`` collects ``sum_y nu[y, z] B_y``."""
    if set(nu.row_labels) != set(b.labels):
        raise ShapeError("stochastic matrix rows do not match the observable's labels")
    out: dict[Label, Array] = {}
    for j, z in enumerate(nu.col_labels):
        total = np.zeros((b.dim, b.dim), dtype=complex)
        for i, y in enumerate(nu.row_labels):
            total = total + nu.matrix[i, j] * b[y]
        out[z] = total
    return Observable(out)


def classify_observable(a: Observable, tol: float = SUM_TOL) -> ObservableFlags:
    """Structural flags of an observable.

    identity: every effect a multiple of the identity; atomic: every effect a
    rank-one projection; indecomposable: every effect rank one; commutative:
    all pairs of effects commute; sharp: every effect a projection.
    """
    eye = np.eye(a.dim)
    identity = all(frob(e - (np.trace(e).real / a.dim) * eye) <= tol for _, e in a.items())
    ranks = [_effect_rank(e) for _, e in a.items()]
    projections = [_is_projection(e, tol) for _, e in a.items()]
    atomic = all(r == 1 and p for r, p in zip(ranks, projections))
    indecomposable = all(r == 1 for r in ranks)
    effects = [e for _, e in a.items()]
    commutative = all(
        commutator_norm(effects[i], effects[j]) <= tol
        for i in range(len(effects))
        for j in range(i + 1, len(effects))
    )
    sharp = all(projections)
    return ObservableFlags(identity, atomic, indecomposable, commutative, sharp)


def obs_commute(a: Observable, b: Observable, tol: float = SUM_TOL) -> bool:
    """True when every effect of ``a`` commutes with every effect of ``b``."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    return all(
        commutator_norm(ax, by) <= tol for _, ax in a.items() for _, by in b.items()
    )


def obs_complementary(a: Observable, b: Observable, tol: float = SUM_TOL) -> bool:
    """A definite value of either observable completely randomizes the other.

    Checks ``A_x o B_y = A_x / n`` and ``B_y o A_x = B_y / m`` for all pairs,
    with ``n`` and ``m`` the outcome counts of ``b`` and ``a``.
    """
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    n, m = len(b), len(a)
    for _, ax in a.items():
        for _, by in b.items():
            if frob(seq_product(ax, by) - ax / n) > tol:
                return False
            if frob(seq_product(by, ax) - by / m) > tol:
                return False
    return True


def complementarity_residual(a: Observable, b: Observable) -> float:
    """Largest deviation from the complementarity identities."""
    n, m = len(b), len(a)
    residual = 0.0
    for _, ax in a.items():
        for _, by in b.items():
            residual = max(residual, frob(seq_product(ax, by) - ax / n))
            residual = max(residual, frob(seq_product(by, ax) - by / m))
    return residual


def fourier_mub(d: int) -> tuple[Array, Array]:
    """Standard basis together with its discrete-Fourier partner.

    The two bases are mutually unbiased: every squared overlap is ``1/d``.
    """
    if d < 2:
        raise DimensionError(f"need dimension >= 2, got {d}")
    k = np.arange(d)
    f = np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    return np.eye(d, dtype=complex), f


def atomic_observable(basis: Array, labels: Sequence[Label] | None = None) -> Observable:
    """Sharp atomic observable built from the columns of a unitary matrix."""
    b = np.asarray(basis, dtype=complex)
    d = b.shape[1]
    if labels is None:
        labels = [str(j) for j in range(d)]
    return Observable(
        {labels[j]: np.outer(b[:, j], b[:, j].conj()) for j in range(d)}
    )


def identity_observable(weights: Mapping[Label, float], dim: int) -> Observable:
    """Observable whose effects are multiples of the identity."""
    w = check_weights(list(weights.values()), len(weights))
    eye = np.eye(dim, dtype=complex)
    return Observable({x: wi * eye for x, wi in zip(weights.keys(), w)})


def obs_coexist_verify(a: Observable, b: Observable, c: Observable, tol: float = SUM_TOL) -> bool:
    """Check that ``c`` is a joint observable for ``a`` and ``b``.

    ``c`` must live on the product value-space; its row sums must reproduce
    ``a`` and its column sums ``b``.
    """
    if a.dim != b.dim or a.dim != c.dim:
        raise DimensionError("dimension mismatch")
    product = {combine_labels(x, y) for x in a.labels for y in b.labels}
    if set(c.labels) != product:
        raise LabelError("joint observable labels do not form the product value-space")
    for x in a.labels:
        row = sum(c[combine_labels(x, y)] for y in b.labels)
        if frob(row - a[x]) > tol:
            return False
    for y in b.labels:
        col = sum(c[combine_labels(x, y)] for x in a.labels)
        if frob(col - b[y]) > tol:
            return False
    return True


def obs_triple_joint(a: Observable, b: Observable, c: Observable) -> Observable:
    """Joint observable ``A_x o (B_y o C_z)`` on the triple product space.

    Its marginals are ``a``, ``b`` conditioned by ``a``, and ``c`` conditioned
    by ``b`` then by ``a``.
    """
    if not (a.dim == b.dim == c.dim):
        raise DimensionError("dimension mismatch")
    out: dict[Label, Array] = {}
    for x, ax in a.items():
        for y, by in b.items():
            for z, cz in c.items():
                out[combine_labels(x, combine_labels(y, z))] = seq_product(ax, seq_product(by, cz))
    return Observable(out)


def joint_probability_then(
    rho: object, a: Observable, x_set: Iterable[Label], b: Observable, y_set: Iterable[Label]
) -> float:
    """Probability of seeing ``a`` in ``X`` and then ``b`` in ``Y``.

    Equals ``tr[rho (A o B)_{X x Y}]``.
    """
    r = ensure_state(rho)
    if r.shape[0] != a.dim or a.dim != b.dim:
        raise DimensionError("dimension mismatch")
    by = obs_effect_of_subset(b, y_set)
    total = 0.0
    for x in x_set:
        total += float(np.trace(r @ seq_product(a[x], by)).real)
    return min(1.0, max(0.0, total))


def find_joint_observable(
    a: Observable, b: Observable, iters: int = 500, tol: float = 1e-7
) -> Observable | None:
    """Heuristic joint-observable search via alternating projections.

    None means "unknown": the heuristic can exhibit a joint observable but can
    never certify that none exists.
    """
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    from .effects import joint_feasibility_search

    rows = [a[x] for x in a.labels]
    cols = [b[y] for y in b.labels]
    blocks = joint_feasibility_search(rows, cols, iters, tol)
    if blocks is None:
        return None
    joint = Observable(
        {
            combine_labels(x, y): hermitian_part(blocks[i][j])
            for i, x in enumerate(a.labels)
            for j, y in enumerate(b.labels)
        },
        sum_tol=max(SUM_TOL, 10 * tol),
    )
    return joint if obs_coexist_verify(a, b, joint, tol=max(SUM_TOL, 10 * tol)) else None
