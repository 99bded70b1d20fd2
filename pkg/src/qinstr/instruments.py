"""Operations, channels, and finite instruments.

An operation is a completely positive trace-non-increasing map, stored
canonically as its Choi matrix with an optional Kraus-operator cache.  An
instrument is a finite label-indexed family of operations whose sum is
trace-preserving; it induces a unique observable that reproduces its outcome
probabilities.

Choi convention (fixed package-wide): the slot order is input (x) output, so
for Kraus operators ``K`` the Choi matrix is the sum of rank-one terms over
vectors ``v[(i, a)] = K[a, i]``.  The induced effect is the transpose of the
partial trace over the output slot, and an operation applies to a matrix via

    out[a, b] = sum_ij rho[i, j] * choi[(i, a), (j, b)]
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .effects import ensure_partial_state, ensure_state
from .errors import (
    DimensionError,
    InvariantViolation,
    LabelError,
    NotComplete,
    ShapeError,
)
from .linalg import Array, as_matrix, ensure_hermitian, frob, herm_sqrt, hermitian_part
from .observables import (
    Label,
    Observable,
    StochasticMatrix,
    check_label,
    check_weights,
    combine_labels,
)

CHOI_TOL = 1e-8
KRAUS_EIG_TOL = 1e-10


def _kraus_to_choi(ops: Sequence[Array], dim: int) -> Array:
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in ops:
        v = k.T.reshape(-1)
        choi += np.outer(v, v.conj())
    return choi


def _choi_to_kraus(choi: Array, dim: int, tol: float = KRAUS_EIG_TOL) -> list[Array]:
    w, vecs = np.linalg.eigh(hermitian_part(choi))
    ops = []
    for k in range(w.size):
        if w[k] > tol:
            ops.append(np.sqrt(w[k]) * vecs[:, k].reshape(dim, dim).T)
    return ops


class Operation:
    """Completely positive trace-non-increasing map in Choi form."""

    def __init__(self, choi: object, kraus: Sequence[Array] | None = None, atol: float = CHOI_TOL):
        c = as_matrix(choi)
        n = c.shape[0]
        dim = int(round(np.sqrt(n)))
        if c.shape != (n, n) or dim * dim != n:
            raise DimensionError(f"Choi matrix shape {c.shape} is not a square of a square")
        c = ensure_hermitian(c, tol=max(atol, 1e-9 * n))
        w = np.linalg.eigvalsh(c)
        scale = max(1.0, float(w[-1]))
        if w[0] < -atol * scale:
            raise InvariantViolation("choi-positive-semidefinite", float(-w[0]))
        self.dim = dim
        c.setflags(write=False)
        self.choi = c
        self._kraus = None
        if kraus is not None:
            ops = [as_matrix(k) for k in kraus]
            for k in ops:
                if k.shape != (dim, dim):
                    raise DimensionError(f"Kraus operator shape {k.shape}, expected {(dim, dim)}")
            rebuilt = _kraus_to_choi(ops, dim)
            residual = frob(rebuilt - c)
            if residual > max(atol, 1e-8 * scale):
                raise InvariantViolation("kraus-matches-choi", residual)
            self._kraus = tuple(ops)
        eff = self.induced_effect
        top = float(np.linalg.eigvalsh(eff)[-1])
        if top > 1.0 + max(atol, 1e-8):
            raise InvariantViolation("trace-non-increasing", top - 1.0)

    @classmethod
    def from_kraus(cls, ops: Sequence[object], atol: float = CHOI_TOL) -> "Operation":
        mats = [as_matrix(k) for k in ops]
        if not mats:
            raise DimensionError("need at least one Kraus operator")
        dim = mats[0].shape[0]
        return cls(_kraus_to_choi(mats, dim), kraus=mats, atol=atol)

    @classmethod
    def from_choi(cls, choi: object, atol: float = CHOI_TOL) -> "Operation":
        return cls(choi, atol=atol)

    @classmethod
    def identity(cls, dim: int) -> "Operation":
        return cls.from_kraus([np.eye(dim, dtype=complex)])

    @classmethod
    def from_unitary(cls, u: object) -> "Operation":
        return cls.from_kraus([as_matrix(u)])

    @cached_property
    def induced_effect(self) -> Array:
        """Effect ``A`` with ``tr[Phi(rho)] = tr(rho A)`` for every state."""
        c4 = self.choi.reshape(self.dim, self.dim, self.dim, self.dim)
        return hermitian_part(np.einsum("iaja->ij", c4).T)

    def apply(self, mat: object) -> Array:
        """Linear action on a matrix (no state validation; see ``op_apply``)."""
        m = as_matrix(mat)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"input shape {m.shape}, expected {(self.dim, self.dim)}")
        if self._kraus is not None:
            out = np.zeros((self.dim, self.dim), dtype=complex)
            for k in self._kraus:
                out += k @ m @ k.conj().T
            return out
        c4 = self.choi.reshape(self.dim, self.dim, self.dim, self.dim)
        return np.einsum("ij,iajb->ab", m, c4)

    def kraus_ops(self, tol: float = KRAUS_EIG_TOL) -> list[Array]:
        """Kraus operators: the cached list when present, else extracted
        from the Choi eigendecomposition (eigenvalues above ``tol``)."""
        if self._kraus is not None:
            return list(self._kraus)
        return _choi_to_kraus(self.choi, self.dim, tol)

    def is_channel(self, tol: float = CHOI_TOL) -> bool:
        return frob(self.induced_effect - np.eye(self.dim)) <= tol

    def __repr__(self) -> str:
        kind = "channel" if self.is_channel() else "operation"
        return f"Operation(dim={self.dim}, {kind}, kraus={'cached' if self._kraus else 'derived'})"


def ensure_channel(op: Operation, tol: float = CHOI_TOL) -> Operation:
    if not op.is_channel(tol):
        residual = frob(op.induced_effect - np.eye(op.dim))
        raise InvariantViolation("trace-preserving", residual)
    return op


def operations_close(a: Operation, b: Operation, tol: float) -> bool:
    if a.dim != b.dim:
        return False
    return frob(a.choi - b.choi) <= tol


def op_apply(phi: Operation, rho: object) -> Array:
    """Apply an operation to a partial state; the output trace equals
    ``tr(rho A)`` for the induced effect ``A``."""
    r = ensure_partial_state(rho)
    if r.shape[0] != phi.dim:
        raise DimensionError(f"state dim {r.shape[0]}, operation dim {phi.dim}")
    return hermitian_part(phi.apply(r))


class Instrument:
    """Label-indexed family of operations summing to a channel."""

    def __init__(self, operations: Mapping[Label, Operation] | Iterable[tuple[Label, Operation]], sum_tol: float = CHOI_TOL):
        items = list(operations.items()) if isinstance(operations, Mapping) else list(operations)
        if not items:
            raise LabelError("an instrument needs at least one outcome")
        ops: dict[Label, Operation] = {}
        for label, op in items:
            label = check_label(label)
            if label in ops:
                raise LabelError(f"duplicate label {label!r}")
            if not isinstance(op, Operation):
                raise DimensionError("instrument outcomes must be Operation instances")
            ops[label] = op
        dims = {op.dim for op in ops.values()}
        if len(dims) != 1:
            raise DimensionError(f"operations of mixed dimensions {sorted(dims)}")
        self.dim = dims.pop()
        total = sum(op.induced_effect for op in ops.values())
        residual = frob(total - np.eye(self.dim))
        if residual > sum_tol:
            raise InvariantViolation("trace-preserving-sum", residual)
        self._ops = ops

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(self._ops)

    def __len__(self) -> int:
        return len(self._ops)

    def __contains__(self, label: Label) -> bool:
        return label in self._ops

    def __getitem__(self, label: Label) -> Operation:
        try:
            return self._ops[label]
        except KeyError:
            raise LabelError(f"unknown label {label!r}") from None

    def items(self):
        return self._ops.items()

    def __repr__(self) -> str:
        return f"Instrument(dim={self.dim}, labels={list(self.labels)!r})"


def instruments_close(a: Instrument, b: Instrument, tol: float) -> bool:
    """Outcome-wise Choi closeness; label sets must match exactly."""
    if a.labels != b.labels or a.dim != b.dim:
        return False
    return all(operations_close(a[x], b[x], tol) for x in a.labels)


def induced_observable(instr: Instrument) -> Observable:
    """The unique observable reproducing the instrument's outcome
    probabilities: ``tr[I_x(rho)] = tr(rho A_x)``."""
    return Observable({x: op.induced_effect for x, op in instr.items()})


def luders_instrument(a: Observable) -> Instrument:
    """Instrument with outcome maps ``rho -> sqrt(A_x) rho sqrt(A_x)``."""
    return Instrument({x: Operation.from_kraus([herm_sqrt(e)]) for x, e in a.items()})


def trivial_instrument(a: Observable, alpha: object) -> Instrument:
    """Instrument that discards the input: ``rho -> tr(rho A_x) alpha``."""
    st = ensure_state(alpha)
    if st.shape[0] != a.dim:
        raise DimensionError(f"state dim {st.shape[0]}, observable dim {a.dim}")
    return Instrument(
        {x: Operation.from_choi(np.kron(e.T, st)) for x, e in a.items()}
    )


def identity_instrument(weights: Mapping[Label, float], dim: int) -> Instrument:
    """Instrument whose outcomes scale the identity channel."""
    w = check_weights(list(weights.values()), len(weights))
    eye = np.eye(dim, dtype=complex)
    return Instrument(
        {x: Operation.from_kraus([np.sqrt(wi) * eye]) for x, wi in zip(weights.keys(), w)}
    )


def kraus_instrument(ops: Mapping[Label, object]) -> Instrument:
    """Instrument with one Kraus operator per outcome."""
    mats = {check_label(x): as_matrix(s) for x, s in ops.items()}
    dims = {m.shape for m in mats.values()}
    if len(dims) != 1:
        raise DimensionError("Kraus operators of mixed shapes")
    dim = next(iter(dims))[0]
    total = sum(m.conj().T @ m for m in mats.values())
    residual = frob(total - np.eye(dim))
    if residual > CHOI_TOL:
        raise NotComplete(f"sum of S*S misses the identity by {residual:.3g}")
    return Instrument({x: Operation.from_kraus([m]) for x, m in mats.items()})


def is_single_kraus(phi: Operation, rel_tol: float = 1e-8) -> bool:
    """True when one Kraus operator suffices (Choi matrix of rank one)."""
    w = np.linalg.eigvalsh(phi.choi)
    top = float(w[-1])
    if top <= 0.0:
        return False
    return int(np.sum(w > rel_tol * top)) == 1


def compose_operations(second: Operation, first: Operation, atol: float = CHOI_TOL) -> Operation:
    """Operation performing ``first`` and then ``second``."""
    if second.dim != first.dim:
        raise DimensionError(f"dimension mismatch {second.dim} vs {first.dim}")
    ops = [t @ s for s in first.kraus_ops() for t in second.kraus_ops()]
    return Operation.from_kraus(ops, atol=atol)


def instr_product(i: Instrument, j: Instrument) -> Instrument:
    """Product instrument on the product value-space: outcome ``(x, y)``
    performs ``I_x`` and then ``J_y``."""
    if i.dim != j.dim:
        raise DimensionError(f"dimension mismatch {i.dim} vs {j.dim}")
    return Instrument(
        {
            combine_labels(x, y): compose_operations(jy, ix)
            for x, ix in i.items()
            for y, jy in j.items()
        }
    )


def instr_channel(i: Instrument) -> Operation:
    """The instrument's total channel, the sum of its outcome operations."""
    total = sum(op.choi for _, op in i.items())
    return ensure_channel(Operation.from_choi(total))


def instr_conditioned(i: Instrument, j: Instrument) -> Instrument:
    """Instrument ``j`` conditioned by ``i``: outcome ``y`` applies ``J_y``
    after the total channel of ``i``."""
    if i.dim != j.dim:
        raise DimensionError(f"dimension mismatch {i.dim} vs {j.dim}")
    ihat = instr_channel(i)
    return Instrument({y: compose_operations(jy, ihat) for y, jy in j.items()})


def instr_convex_combo(weights: Sequence[float], instruments: Sequence[Instrument]) -> Instrument:
    """Outcome-wise mixture of instruments sharing one value-space."""
    if not instruments:
        raise LabelError("no instruments given")
    w = check_weights(weights, len(instruments))
    labels = instruments[0].labels
    for i in instruments[1:]:
        if i.labels != labels:
            raise LabelError("instruments do not share a value-space")
        if i.dim != instruments[0].dim:
            raise DimensionError("instruments of mixed dimensions")
    return Instrument(
        {
            x: Operation.from_choi(sum(wi * i[x].choi for wi, i in zip(w, instruments)))
            for x in labels
        }
    )


def instr_post_process(nu: StochasticMatrix, i: Instrument) -> Instrument:
    """Classical relabeling of outcomes: ``(nu . I)_y = sum_x nu[x, y] I_x``."""
    if set(nu.row_labels) != set(i.labels):
        raise ShapeError("stochastic matrix rows do not match the instrument's labels")
    out: dict[Label, Operation] = {}
    for cidx, y in enumerate(nu.col_labels):
        total = np.zeros_like(i[i.labels[0]].choi)
        for ridx, x in enumerate(nu.row_labels):
            total = total + nu.matrix[ridx, cidx] * i[x].choi
        out[y] = Operation.from_choi(total)
    return Instrument(out)


def _hermitian_basis(dim: int) -> list[Array]:
    basis = []
    for i in range(dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[i, i] = 1.0
        basis.append(m)
    for i in range(dim):
        for j in range(i + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = m[j, i] = 0.5
            basis.append(m)
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = -0.5j
            m[j, i] = 0.5j
            basis.append(m)
    return basis


def instr_complementary(i: Instrument, j: Instrument, tol: float = CHOI_TOL) -> bool:
    """A definite value of either instrument completely randomizes the other.

    The defining identities quantify over all states; both sides are linear
    in the state, so they are checked on a Hermitian operator basis (the
    symmetrized matrix units), which is equivalent, not an approximation.
    """
    if i.dim != j.dim:
        raise DimensionError(f"dimension mismatch {i.dim} vs {j.dim}")
    a = induced_observable(i)
    b = induced_observable(j)
    n, m = len(j), len(i)
    roots_a = {x: herm_sqrt(a[x]) for x in a.labels}
    roots_b = {y: herm_sqrt(b[y]) for y in b.labels}
    for sigma in _hermitian_basis(i.dim):
        for x, ix in i.items():
            cond = roots_a[x] @ sigma @ roots_a[x]
            ref = np.trace(ix.apply(sigma)) / n
            for _, jy in j.items():
                if abs(np.trace(jy.apply(cond)) - ref) > tol:
                    return False
        for y, jy in j.items():
            cond = roots_b[y] @ sigma @ roots_b[y]
            ref = np.trace(jy.apply(sigma)) / m
            for _, ix in i.items():
                if abs(np.trace(ix.apply(cond)) - ref) > tol:
                    return False
    return True


def instr_coexist_verify(i: Instrument, j: Instrument, joint: Instrument, tol: float = CHOI_TOL) -> bool:
    """Check that ``joint`` has marginals ``i`` and ``j`` (outcome-wise in
    Choi form)."""
    product = {combine_labels(x, y) for x in i.labels for y in j.labels}
    if set(joint.labels) != product:
        raise LabelError("joint instrument labels do not form the product value-space")
    for x in i.labels:
        row = sum(joint[combine_labels(x, y)].choi for y in j.labels)
        if frob(row - i[x].choi) > tol:
            return False
    for y in j.labels:
        col = sum(joint[combine_labels(x, y)].choi for x in i.labels)
        if frob(col - j[y].choi) > tol:
            return False
    return True


def joint_probability_instr(
    rho: object, i: Instrument, x_set: Iterable[Label], j: Instrument, y_set: Iterable[Label]
) -> float:
    """Probability of outcome set ``X`` for ``i`` and then ``Y`` for ``j``."""
    r = ensure_state(rho)
    if r.shape[0] != i.dim or i.dim != j.dim:
        raise DimensionError("dimension mismatch")
    mid = np.zeros((i.dim, i.dim), dtype=complex)
    for x in x_set:
        mid = mid + i[x].apply(r)
    total = 0.0
    for y in y_set:
        total += float(np.trace(j[y].apply(mid)).real)
    return min(1.0, max(0.0, total))


def kraus_instrument_from_channel(a: Operation, tol: float = KRAUS_EIG_TOL) -> Instrument:
    """Split a channel into the Kraus instrument of its canonical operators.

    One outcome per Choi eigenvector with eigenvalue above ``tol``; the
    resulting instrument's total channel is the input channel.
    """
    ensure_channel(a)
    ops = _choi_to_kraus(a.choi, a.dim, tol)
    return Instrument({f"k{n}": Operation.from_kraus([s]) for n, s in enumerate(ops)})


def is_identity_instrument(i: Instrument, tol: float = CHOI_TOL) -> bool:
    """True when every outcome is a scalar multiple of the identity channel."""
    id_choi = Operation.identity(i.dim).choi
    for _, op in i.items():
        weight = float(np.trace(op.choi).real) / i.dim
        if weight < -tol or frob(op.choi - weight * id_choi) > tol:
            return False
    return True
