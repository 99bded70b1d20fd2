"""Dense complex-matrix kernel: spectral, tensor, and basis-completion primitives.

Conventions used throughout the package:

- matrices are ``numpy`` arrays of dtype complex128, row-major;
- composite spaces are ordered base-slow / probe-fast, i.e. the pair index
  ``(i, k)`` on ``H (x) K`` flattens to ``i * dimK + k`` and matches
  ``numpy.kron(base, probe)``;
- Hermitian inputs are symmetrized to ``(M + M^*) / 2`` after checking that
  the anti-Hermitian residual is within tolerance.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (
    DimensionError,
    EigenSolverError,
    NotHermitian,
    NotIsometry,
    NotPositiveSemidefinite,
    QinstrError,
    ZeroVector,
)

Array = np.ndarray

HERM_TOL = 1e-9
PSD_TOL = 1e-9
ORTHO_TOL = 1e-9


def as_matrix(m: object) -> Array:
    """Coerce to a finite 2-D complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise QinstrError("matrix contains non-finite entries")
    return a


def as_vector(v: object) -> Array:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size < 1:
        raise DimensionError("expected a nonempty vector")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise QinstrError("vector contains non-finite entries")
    return a


def frob(a: Array) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def spectral_norm(a: Array) -> float:
    """Operator (largest-singular-value) norm."""
    return float(np.linalg.norm(a, 2))


def hermitian_part(m: Array) -> Array:
    return (m + m.conj().T) / 2.0


def ensure_hermitian(m: object, tol: float | None = None) -> Array:
    """Return the symmetrization of ``m``, rejecting grossly non-Hermitian input.

    The allowed anti-Hermitian residual is ``HERM_TOL * dim`` unless ``tol``
    is given explicitly.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    limit = HERM_TOL * a.shape[0] if tol is None else tol
    residual = frob(a - a.conj().T)
    if residual > limit:
        raise NotHermitian(f"anti-Hermitian residual {residual:.3g} exceeds {limit:.3g}")
    return hermitian_part(a)


def herm_eig(m: object) -> tuple[Array, Array]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with real eigenvalues ``w`` ascending and unitary ``V``
    such that ``m = V diag(w) V^*``.  Backed by the deterministic LAPACK
    Hermitian solver.
    """
    a = ensure_hermitian(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        off = frob(a - np.diag(np.diag(a)))
        raise EigenSolverError(f"eigensolver did not converge; off-diagonal residual {off:.3g}") from exc
    return w, v


def herm_sqrt(m: object, neg_tol: float = PSD_TOL) -> Array:
    """Unique positive square root of a PSD Hermitian matrix.

    Eigenvalues in ``[-neg_tol, 0)`` are clamped to zero; anything below
    ``-neg_tol`` raises ``NotPositiveSemidefinite``.  Eigenvalues below a
    relative noise floor of ``1e-12 * max(w)`` are zeroed as well: the square
    root would otherwise amplify eigensolver noise of size ``eps`` into
    errors of size ``sqrt(eps)``.
    """
    w, v = herm_eig(m)
    if w[0] < -neg_tol:
        raise NotPositiveSemidefinite(f"eigenvalue {w[0]:.3g} below -{neg_tol:.3g}")
    floor = 1e-12 * max(float(w[-1]), 0.0)
    w = np.where(w < floor, 0.0, w)
    return hermitian_part((v * np.sqrt(w)) @ v.conj().T)


def psd_part(m: Array) -> Array:
    """Projection onto the PSD cone (eigenvalue clamp at zero)."""
    w, v = np.linalg.eigh(hermitian_part(m))
    w = np.clip(w, 0.0, None)
    return hermitian_part((v * w) @ v.conj().T)


def tensor_product(a: object, b: object) -> Array:
    """Kronecker product, base index slow and probe index fast."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_second(m: object, dim_base: int, dim_probe: int) -> Array:
    """Trace out the second (probe) factor of a matrix on the composite space."""
    a = as_matrix(m)
    n = dim_base * dim_probe
    if a.shape != (n, n):
        raise DimensionError(f"expected shape {(n, n)}, got {a.shape}")
    return np.einsum("ikjk->ij", a.reshape(dim_base, dim_probe, dim_base, dim_probe))


def partial_trace_first(m: object, dim_base: int, dim_probe: int) -> Array:
    """Trace out the first (base) factor of a matrix on the composite space."""
    a = as_matrix(m)
    n = dim_base * dim_probe
    if a.shape != (n, n):
        raise DimensionError(f"expected shape {(n, n)}, got {a.shape}")
    return np.einsum("kikj->ij", a.reshape(dim_base, dim_probe, dim_base, dim_probe))


def _phase_fix(v: Array, tol: float = 1e-9) -> Array:
    """Rotate a vector so its first entry of significant magnitude is real positive."""
    for entry in v:
        if abs(entry) > tol:
            return v * (abs(entry) / entry)
    raise ZeroVector("cannot phase-fix a zero vector")


def complete_to_unitary(columns: Sequence[object], dim: int) -> Array:
    """Extend orthonormal columns to a unitary matrix, deterministically.

    The inputs become the first columns.  Remaining columns come from
    orthonormalizing the standard basis against everything accepted so far,
    in index order, dropping dependent candidates; each new column gets its
    phase fixed so its first nonzero entry is real positive.
    """
    cols: list[Array] = []
    for c in columns:
        v = as_vector(c)
        if v.size != dim:
            raise DimensionError(f"column has length {v.size}, expected {dim}")
        cols.append(v)
    if len(cols) > dim:
        raise DimensionError(f"{len(cols)} columns exceed dimension {dim}")
    if cols:
        g = np.array([[np.vdot(x, y) for y in cols] for x in cols])
        if frob(g - np.eye(len(cols))) > ORTHO_TOL * max(1, len(cols)):
            raise NotIsometry("input columns are not orthonormal")

    for k in range(dim):
        if len(cols) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        for _ in range(2):  # re-orthogonalize for stability
            for c in cols:
                v = v - np.vdot(c, v) * c
        norm = np.linalg.norm(v)
        if norm < 1e-6:
            continue  # standard basis vector dependent on accepted columns
        cols.append(_phase_fix(v / norm))
    if len(cols) != dim:
        raise NotIsometry("could not complete the given columns to a unitary")
    u = np.column_stack(cols)
    return u


def matrices_close(a: object, b: object, tol: float) -> bool:
    """Frobenius-distance comparison; mismatched shapes are an error."""
    x, y = as_matrix(a), as_matrix(b)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {y.shape}")
    return frob(x - y) <= tol


def is_unitary(u: Array, tol: float = 1e-8) -> bool:
    a = as_matrix(u)
    if a.shape[0] != a.shape[1]:
        return False
    return frob(a.conj().T @ a - np.eye(a.shape[0])) <= tol


def commutator_norm(a: Array, b: Array) -> float:
    return frob(a @ b - b @ a)
