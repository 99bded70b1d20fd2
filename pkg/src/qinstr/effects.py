"""Effects, states, the sequential product, complements, and pairwise coexistence.

An effect is a Hermitian matrix ``a`` with ``0 <= a <= 1``; it answers a
yes-no measurement.  Measuring ``a`` first and ``b`` second yields the
sequential product ``sqrt(a) b sqrt(a)``, which conditions ``b`` on the
occurrence of ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidWitness, InvariantViolation, ZeroVector
from .linalg import (
    Array,
    as_vector,
    ensure_hermitian,
    frob,
    herm_sqrt,
    hermitian_part,
    psd_part,
)

EFFECT_EIG_TOL = 1e-9
STATE_TRACE_TOL = 1e-9


def ensure_effect(m: object, eig_tol: float = EFFECT_EIG_TOL) -> Array:
    """Validate and normalize an effect matrix.

    Eigenvalues within ``eig_tol`` of ``[0, 1]`` are clamped onto the
    interval; anything further out fails construction.
    """
    a = ensure_hermitian(m)
    w, v = np.linalg.eigh(a)
    low, high = float(w[0]), float(w[-1])
    if low < -eig_tol or high > 1.0 + eig_tol:
        residual = max(0.0, -low, high - 1.0)
        raise InvariantViolation("effect-range", residual)
    if low < 0.0 or high > 1.0:
        a = hermitian_part((v * np.clip(w, 0.0, 1.0)) @ v.conj().T)
    return a


def ensure_partial_state(m: object, tol: float = STATE_TRACE_TOL) -> Array:
    """Validate a PSD matrix with trace at most one."""
    a = ensure_hermitian(m)
    w = np.linalg.eigvalsh(a)
    if w[0] < -tol * max(1.0, abs(w[-1])):
        raise InvariantViolation("positive-semidefinite", float(-w[0]))
    tr = float(np.trace(a).real)
    if tr > 1.0 + tol:
        raise InvariantViolation("trace-at-most-one", tr - 1.0)
    return a


def ensure_state(m: object, tol: float = STATE_TRACE_TOL) -> Array:
    """Validate a density matrix (PSD, unit trace)."""
    a = ensure_partial_state(m, tol)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > tol:
        raise InvariantViolation("trace-one", abs(tr - 1.0))
    return a


def _same_dim(a: Array, b: Array) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch {a.shape} vs {b.shape}")


def atom(phi: object) -> Array:
    """Rank-one projection onto a unit vector."""
    v = as_vector(phi)
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ZeroVector("cannot build an atom from the zero vector")
    v = v / norm
    return np.outer(v, v.conj())


def seq_product(a: object, b: object) -> Array:
    """Sequential product ``sqrt(a) b sqrt(a)``: measure ``a``, then ``b``."""
    ea, eb = ensure_effect(a), ensure_effect(b)
    _same_dim(ea, eb)
    r = herm_sqrt(ea)
    return ensure_effect(r @ eb @ r)


def complement(a: object) -> Array:
    """Complement ``1 - a``; together with ``a`` it sums exactly to the identity."""
    ea = ensure_effect(a)
    return np.eye(ea.shape[0], dtype=complex) - ea


def occurrence_probability(rho: object, a: object) -> float:
    """Probability ``tr(rho a)`` that the effect occurs in the given state."""
    r, ea = ensure_state(rho), ensure_effect(a)
    _same_dim(r, ea)
    p = float(np.trace(r @ ea).real)
    return min(1.0, max(0.0, p))


def conditioned_partial_state(a: object, rho: object) -> Array:
    """Post-measurement partial state ``sqrt(a) rho sqrt(a)``.

    Its trace equals the occurrence probability of ``a`` in ``rho``.
    """
    ea = ensure_effect(a)
    r = ensure_partial_state(rho)
    _same_dim(ea, r)
    s = herm_sqrt(ea)
    return hermitian_part(s @ r @ s)


@dataclass(frozen=True)
class CoexistenceWitness:
    """Decomposition ``a = a1 + c``, ``b = b1 + c`` with ``a1 + b1 + c <= 1``."""

    a1: Array
    b1: Array
    c: Array


def check_coexistence_witness(a: object, b: object, w: CoexistenceWitness, atol: float = 1e-8) -> bool:
    """Check the witness equations; any violation returns False."""
    try:
        ea, eb = ensure_effect(a), ensure_effect(b)
        a1, b1, c = ensure_effect(w.a1), ensure_effect(w.b1), ensure_effect(w.c)
    except InvariantViolation:
        return False
    if not (ea.shape == eb.shape == a1.shape == b1.shape == c.shape):
        return False
    if frob(a1 + c - ea) > atol or frob(b1 + c - eb) > atol:
        return False
    # a1 + b1 + c <= 1 means the leftover d = 1 - a1 - b1 - c is PSD.
    d = np.eye(ea.shape[0], dtype=complex) - a1 - b1 - c
    return float(np.linalg.eigvalsh(hermitian_part(d))[0]) >= -atol


def binary_observables_from_coexistence(a: object, b: object, w: CoexistenceWitness):
    """Joint observable on 2x2 labels whose marginals are ``{a, a'}`` and ``{b, b'}``.

    Outcome ("1","1") carries the common part ``c``, ("1","2") carries ``a1``,
    ("2","1") carries ``b1``, and ("2","2") the leftover ``1 - a1 - b1 - c``.
    """
    from .observables import Observable

    if not check_coexistence_witness(a, b, w):
        raise InvalidWitness("witness does not decompose the given effects")
    ea = ensure_effect(a)
    a1, b1, c = ensure_effect(w.a1), ensure_effect(w.b1), ensure_effect(w.c)
    d = ensure_effect(np.eye(ea.shape[0], dtype=complex) - a1 - b1 - c)
    return Observable(
        {
            ("1", "1"): c,
            ("1", "2"): a1,
            ("2", "1"): b1,
            ("2", "2"): d,
        }
    )


# -- feasibility search -------------------------------------------------------
#
# Joint-observable feasibility is a semidefinite problem; the search below is
# a heuristic (alternating projection between the marginal-matching affine
# subspace and the PSD cone).  Failure means "unknown", never "no".


def joint_feasibility_search(
    row_effects: list[Array],
    col_effects: list[Array],
    iters: int = 500,
    tol: float = 1e-7,
) -> list[list[Array]] | None:
    """Search for PSD blocks C[x][y] with row sums ``row_effects`` and column
    sums ``col_effects``.  Returns the blocks, or None when no candidate was
    found within the iteration budget."""
    m, n = len(row_effects), len(col_effects)
    dim = row_effects[0].shape[0]
    rows = [ensure_hermitian(r) for r in row_effects]
    cols = [ensure_hermitian(c) for c in col_effects]

    # Affine constraints act identically and independently on every matrix
    # entry: M @ vec(C-blocks) = vec(targets), with M the bipartite incidence
    # matrix over block positions.
    mat = np.zeros((m + n, m * n))
    for x in range(m):
        for y in range(n):
            mat[x, x * n + y] = 1.0
            mat[m + y, x * n + y] = 1.0
    proj = mat.T @ np.linalg.pinv(mat @ mat.T)

    target = np.stack([*rows, *cols])  # (m+n, dim, dim)
    blocks = np.zeros((m * n, dim, dim), dtype=complex)
    for x in range(m):
        for y in range(n):
            blocks[x * n + y] = (rows[x] + cols[y]) / (m + n)

    def project_affine(bl: np.ndarray) -> np.ndarray:
        residual = np.einsum("ck,kij->cij", mat, bl) - target
        return bl - np.einsum("kc,cij->kij", proj, residual)

    for _ in range(iters):
        blocks = project_affine(blocks)
        blocks = np.stack([psd_part(bl) for bl in blocks])
        residual = np.einsum("ck,kij->cij", mat, blocks) - target
        if max(frob(r) for r in residual) <= tol:
            return [[blocks[x * n + y] for y in range(n)] for x in range(m)]
    return None


def find_coexistence_witness(
    a: object, b: object, iters: int = 500, tol: float = 1e-7
) -> CoexistenceWitness | None:
    """Heuristic search for a coexistence witness of two effects.

    Returns None when the search fails; that outcome means "unknown", since
    the projection heuristic cannot certify infeasibility.  A found common
    part ``c`` is polished so the witness equations hold exactly.
    """
    ea, eb = ensure_effect(a), ensure_effect(b)
    _same_dim(ea, eb)
    eye = np.eye(ea.shape[0], dtype=complex)
    # Run tighter than the documented success threshold so the witness
    # survives validation at 1e-8 after polishing.
    blocks = joint_feasibility_search(
        [ea, eye - ea], [eb, eye - eb], max(iters, 2000), min(tol, 5e-10)
    )
    if blocks is None:
        return None
    c = ensure_effect(psd_part(blocks[0][0]))
    w = CoexistenceWitness(a1=ea - c, b1=eb - c, c=c)
    return w if check_coexistence_witness(ea, eb, w) else None
