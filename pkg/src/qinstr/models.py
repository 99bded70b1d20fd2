"""Measurement models: base-probe interactions and the instruments they measure.

A model couples the base system to a probe through a channel, then reads a
pointer observable off the probe; tracing out the probe leaves an instrument
on the base system.  Interaction channels are stored as plain unitary
matrices when available (von Neumann, swap, dilation) and as Choi-form
operations otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .effects import ensure_state
from .errors import (
    DimensionError,
    LabelError,
    NotCommutative,
    NotIsometry,
    NotNormal,
)
from .instruments import Instrument, Operation, ensure_channel
from .linalg import (
    Array,
    as_matrix,
    complete_to_unitary,
    frob,
    herm_eig,
    hermitian_part,
    is_unitary,
    partial_trace_second,
    tensor_product,
)
from .observables import Label, Observable, classify_observable

MODEL_TOL = 1e-7


def _phase_fixed_unit_vector(m: Array, tol: float = 1e-8) -> Array:
    """Principal eigenvector of a rank-one PSD matrix, phase-fixed."""
    w, v = herm_eig(m)
    if w[-1] <= tol or (w.size > 1 and w[-2] > tol * max(1.0, w[-1])):
        raise NotNormal("matrix is not rank one within tolerance")
    vec = v[:, -1]
    for entry in vec:
        if abs(entry) > 1e-9:
            return vec * (abs(entry) / entry)
    raise NotNormal("degenerate eigenvector")


class FIMM:
    """Finite measurement model: base and probe spaces, initial probe state,
    interaction channel on the composite space, and pointer observable."""

    def __init__(
        self,
        dim_base: int,
        dim_probe: int,
        probe_state: object,
        interaction: object,
        pointer: Observable,
    ):
        if dim_base < 1 or dim_probe < 1:
            raise DimensionError("dimensions must be at least 1")
        self.dim_base = int(dim_base)
        self.dim_probe = int(dim_probe)
        eta = ensure_state(probe_state)
        if eta.shape[0] != self.dim_probe:
            raise DimensionError(f"probe state dim {eta.shape[0]}, expected {self.dim_probe}")
        eta.setflags(write=False)
        self.probe_state = eta
        if pointer.dim != self.dim_probe:
            raise DimensionError(f"pointer dim {pointer.dim}, expected {self.dim_probe}")
        self.pointer = pointer
        n = self.dim_base * self.dim_probe
        if isinstance(interaction, Operation):
            if interaction.dim != n:
                raise DimensionError(f"interaction dim {interaction.dim}, expected {n}")
            ensure_channel(interaction)
            self.interaction = interaction
        else:
            u = as_matrix(interaction)
            if u.shape != (n, n):
                raise DimensionError(f"interaction shape {u.shape}, expected {(n, n)}")
            if not is_unitary(u, tol=1e-8):
                raise NotIsometry("interaction matrix is not unitary")
            u.setflags(write=False)
            self.interaction = u
        self.sharp = classify_observable(pointer).sharp

    def apply_interaction(self, mat: Array) -> Array:
        if isinstance(self.interaction, Operation):
            return self.interaction.apply(mat)
        return self.interaction @ mat @ self.interaction.conj().T

    def __repr__(self) -> str:
        return (
            f"FIMM(dim_base={self.dim_base}, dim_probe={self.dim_probe}, "
            f"pointer_labels={list(self.pointer.labels)!r}, sharp={self.sharp})"
        )


def model_instrument(m: FIMM, atol: float = MODEL_TOL) -> Instrument:
    """Instrument measured by a model.

    Outcome ``x`` maps ``rho`` to the probe-trace of
    ``nu(rho (x) eta) (1 (x) F_x)``; the Choi matrices are assembled by
    evaluating that formula on the matrix units of the base space.
    """
    d, dk = m.dim_base, m.dim_probe
    images: dict[Label, Array] = {x: np.zeros((d, d, d, d), dtype=complex) for x in m.pointer.labels}
    eye_probe = {x: np.kron(np.eye(d), m.pointer[x]) for x in m.pointer.labels}
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            evolved = m.apply_interaction(tensor_product(unit, m.probe_state))
            for x in m.pointer.labels:
                out = partial_trace_second(evolved @ eye_probe[x], d, dk)
                images[x][i, :, j, :] = out
    return Instrument(
        {x: Operation.from_choi(c4.reshape(d * d, d * d), atol=atol) for x, c4 in images.items()},
        sum_tol=atol,
    )


def swap_unitary(d: int) -> Array:
    """Unitary exchanging the two factors of a d-by-d composite space."""
    if d < 1:
        raise DimensionError("dimension must be at least 1")
    u = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            u[j * d + i, i * d + j] = 1.0
    return u


def trivial_fimm(eta: object, pointer: Observable) -> FIMM:
    """Swap-interaction model; it measures the instrument that discards the
    input and prepares ``eta`` with probabilities read from ``pointer``."""
    st = ensure_state(eta)
    d = st.shape[0]
    if pointer.dim != d:
        raise DimensionError(f"pointer dim {pointer.dim}, state dim {d}")
    return FIMM(d, d, st, swap_unitary(d), pointer)


def von_neumann_unitary(base_basis: object, probe_basis: object) -> Array:
    """Basis-pairing unitary: it copies the base-basis index into the probe.

    Sends ``psi_i (x) phi_0`` to ``psi_i (x) phi_i``, swaps back
    ``psi_i (x) phi_i`` to ``psi_i (x) phi_0`` for ``i != 0``, and fixes all
    other basis pairs; an involution on the product basis.
    """
    base = as_matrix(base_basis)
    probe = as_matrix(probe_basis)
    if base.shape != probe.shape or base.shape[0] != base.shape[1]:
        raise DimensionError("bases must be square and of equal dimension")
    if not is_unitary(base, 1e-9) or not is_unitary(probe, 1e-9):
        raise NotIsometry("bases must be unitary")
    d = base.shape[0]
    u = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        p_base = np.outer(base[:, i], base[:, i].conj())
        perm = np.zeros((d, d), dtype=complex)
        for j in range(d):
            tgt = i if j == 0 else (0 if j == i else j)
            perm += np.outer(probe[:, tgt], probe[:, j].conj())
        u += np.kron(p_base, perm)
    return u


@dataclass(frozen=True)
class VonNeumannModel:
    """Model with a pure probe state and a basis-pairing unitary."""

    base_basis: Array
    probe_basis: Array
    pointer: Observable

    def __post_init__(self):
        base = as_matrix(self.base_basis)
        probe = as_matrix(self.probe_basis)
        if base.shape != probe.shape or base.shape[0] != base.shape[1]:
            raise DimensionError("bases must be square and of equal dimension")
        if not is_unitary(base, 1e-9) or not is_unitary(probe, 1e-9):
            raise NotIsometry("bases must be unitary")
        if self.pointer.dim != probe.shape[0]:
            raise DimensionError("pointer dimension does not match the probe basis")

    @property
    def dim(self) -> int:
        return self.base_basis.shape[0]

    def to_fimm(self) -> FIMM:
        phi0 = self.probe_basis[:, 0]
        eta = np.outer(phi0, phi0.conj())
        return FIMM(
            self.dim,
            self.dim,
            eta,
            von_neumann_unitary(self.base_basis, self.probe_basis),
            self.pointer,
        )


def vn_measured(model: VonNeumannModel) -> tuple[Instrument, Operation, Observable]:
    """Closed forms of the instrument, channel, and observable a
    basis-pairing model measures.

    Outcome ``x`` maps ``rho`` to
    ``sum_ij <psi_i, rho psi_j> <phi_j, F_x phi_i> |psi_i><psi_j|``; the
    channel dephases in the base basis; the observable mixes base-basis
    projections with pointer diagonal weights.
    """
    w = model.base_basis
    phi = model.probe_basis
    d = model.dim
    base_projs = [np.outer(w[:, i], w[:, i].conj()) for i in range(d)]
    channel = Operation.from_kraus(base_projs)

    instrument_ops: dict[Label, Operation] = {}
    observable_effects: dict[Label, Array] = {}
    for x in model.pointer.labels:
        h = phi.conj().T @ model.pointer[x] @ phi  # h[i, j] = <phi_i, F_x phi_j>
        c4 = np.zeros((d, d, d, d), dtype=complex)
        for k in range(d):
            for l in range(d):
                unit = np.zeros((d, d), dtype=complex)
                unit[k, l] = 1.0
                coef = (w.conj().T @ unit @ w) * h.T  # B[i,j] * <phi_j, F_x phi_i>
                c4[k, :, l, :] = w @ coef @ w.conj().T
        instrument_ops[x] = Operation.from_choi(c4.reshape(d * d, d * d))
        observable_effects[x] = sum(h[i, i].real * base_projs[i] for i in range(d))
    return Instrument(instrument_ops), channel, Observable(observable_effects)


def vn_model_for_commutative(
    a: Observable, rng: np.random.Generator | None = None, attempts: int = 32
) -> VonNeumannModel:
    """Basis-pairing model measuring a commutative observable.

    The shared eigenbasis comes from a random real combination of the
    effects; a draw is accepted only if it actually diagonalizes every
    effect (collisions among eigenvalues force a redraw unless the effects
    are scalar on the colliding block).
    """
    if not classify_observable(a).commutative:
        raise NotCommutative("observable effects do not pairwise commute")
    if rng is None:
        rng = np.random.default_rng(20210)
    d = a.dim
    effects = [a[x] for x in a.labels]
    basis = None
    for _ in range(attempts):
        coeffs = rng.standard_normal(len(effects))
        mix = hermitian_part(sum(c * e for c, e in zip(coeffs, effects)))
        _, v = herm_eig(mix)
        off = 0.0
        for e in effects:
            rotated = v.conj().T @ e @ v
            off = max(off, frob(rotated - np.diag(np.diag(rotated))))
        if off <= 1e-9 * max(1.0, d):
            basis = v
            break
    if basis is None:
        raise NotCommutative("failed to find a joint eigenbasis")
    pointer = Observable(
        {
            x: np.diag([float((basis[:, j].conj() @ a[x] @ basis[:, j]).real) for j in range(d)]).astype(complex)
            for x in a.labels
        }
    )
    return VonNeumannModel(basis, np.eye(d, dtype=complex), pointer)


def dilate_instrument(instr: Instrument) -> FIMM:
    """Realize an instrument as a sharp measurement model.

    The probe carries one basis slot per Kraus operator (outcome-major,
    Kraus-index-minor); the isometry stacking the operators is polished to
    exact orthonormality and completed to a unitary; the pointer
    coarse-grains slots by outcome, so it is atomic exactly when every
    outcome has a single Kraus operator.
    """
    d = instr.dim
    slots: list[Array] = []
    slot_ranges: dict[Label, tuple[int, int]] = {}
    for x in instr.labels:
        start = len(slots)
        slots.extend(instr[x].kraus_ops())
        slot_ranges[x] = (start, len(slots))
    n = len(slots)
    if n == 0:
        raise DimensionError("instrument has no Kraus operators")

    iso = np.zeros((d * n, d), dtype=complex)
    view = iso.reshape(d, n, d)
    for s, op in enumerate(slots):
        view[:, s, :] = op
    gram = iso.conj().T @ iso
    gw, gv = np.linalg.eigh(hermitian_part(gram))
    if gw[0] < 0.5:
        raise NotIsometry("stacked Kraus columns are numerically rank deficient")
    inv_root = (gv / np.sqrt(gw)) @ gv.conj().T
    iso = iso @ inv_root  # exact orthonormality before completion

    base_unitary = complete_to_unitary([iso[:, i] for i in range(d)], d * n)
    sources = [i * n for i in range(d)]
    sources += [k for k in range(d * n) if k not in set(sources)]
    perm = np.zeros((d * n, d * n), dtype=complex)
    for r, src in enumerate(sources):
        perm[r, src] = 1.0
    interaction = base_unitary @ perm

    eta = np.zeros((n, n), dtype=complex)
    eta[0, 0] = 1.0
    pointer_effects: dict[Label, Array] = {}
    for x, (start, stop) in slot_ranges.items():
        diag = np.zeros(n)
        diag[start:stop] = 1.0
        pointer_effects[x] = np.diag(diag).astype(complex)
    pointer = Observable(pointer_effects)
    return FIMM(d, n, eta, interaction, pointer)


def normal_fimm_kraus_extract(m: FIMM) -> dict[Label, Array]:
    """Kraus operators of a normal model (pure probe, unitary interaction,
    atomic pointer), one per pointer outcome.

    ``S_x[j, i] = <e_j (x) phi_x, U (e_i (x) phi)>`` with ``phi`` the initial
    probe vector and ``phi_x`` the pointer atoms, both phase-fixed.
    """
    if isinstance(m.interaction, Operation):
        kraus = m.interaction.kraus_ops()
        if len(kraus) != 1 or not is_unitary(kraus[0], 1e-8):
            raise NotNormal("interaction channel is not unitary")
        u = kraus[0]
    else:
        u = m.interaction
    try:
        phi = _phase_fixed_unit_vector(m.probe_state)
        pointer_vectors = {x: _phase_fixed_unit_vector(m.pointer[x]) for x in m.pointer.labels}
    except NotNormal as exc:
        raise NotNormal(f"model is not normal: {exc}") from exc

    d, dk = m.dim_base, m.dim_probe
    extracted: dict[Label, Array] = {}
    evolved = np.zeros((d, d, dk), dtype=complex)
    for i in range(d):
        unit = np.zeros(d, dtype=complex)
        unit[i] = 1.0
        evolved[i] = (u @ np.kron(unit, phi)).reshape(d, dk)
    for x, vec in pointer_vectors.items():
        s = np.zeros((d, d), dtype=complex)
        for i in range(d):
            s[:, i] = evolved[i] @ vec.conj()
        extracted[x] = s
    total = sum(s.conj().T @ s for s in extracted.values())
    residual = frob(total - np.eye(d))
    if residual > 1e-8 * max(1.0, d):
        raise NotNormal(f"extracted operators miss completeness by {residual:.3g}")
    return extracted


def luders_positivity_check(m: FIMM, tol: float = 1e-8) -> bool:
    """True when every extracted Kraus operator is positive semidefinite.

    A passing model measures the measurement-update instrument of its own
    observable (outcome maps ``rho -> sqrt(A_x) rho sqrt(A_x)``).
    """
    ops = normal_fimm_kraus_extract(m)
    for s in ops.values():
        scale = max(1.0, frob(s))
        if frob(s - s.conj().T) > tol * scale:
            return False
        if float(np.linalg.eigvalsh(hermitian_part(s))[0]) < -tol:
            return False
    return True


def _split_pair(label: Label) -> tuple[Label, Label]:
    if not isinstance(label, tuple) or len(label) < 2:
        raise LabelError(f"label {label!r} is not a product label")
    rest = label[1:]
    return label[0], (rest[0] if len(rest) == 1 else rest)


def simultaneous_fimms(joint: Instrument) -> tuple[FIMM, FIMM]:
    """Two models that differ only in their pointers and measure the two
    marginals of a joint instrument.

    The joint instrument is dilated with a sharp pointer over the product
    labels; each returned model coarse-grains that pointer over one factor,
    so the two pointers commute.
    """
    dilated = dilate_instrument(joint)
    first_labels: list[Label] = []
    second_labels: list[Label] = []
    for lab in joint.labels:
        x, y = _split_pair(lab)
        if x not in first_labels:
            first_labels.append(x)
        if y not in second_labels:
            second_labels.append(y)
    zero = np.zeros((dilated.dim_probe, dilated.dim_probe), dtype=complex)
    f1 = {x: zero.copy() for x in first_labels}
    f2 = {y: zero.copy() for y in second_labels}
    for lab in joint.labels:
        x, y = _split_pair(lab)
        f1[x] = f1[x] + dilated.pointer[lab]
        f2[y] = f2[y] + dilated.pointer[lab]
    m1 = FIMM(dilated.dim_base, dilated.dim_probe, dilated.probe_state, dilated.interaction, Observable(f1))
    m2 = FIMM(dilated.dim_base, dilated.dim_probe, dilated.probe_state, dilated.interaction, Observable(f2))
    return m1, m2


def marginal_instruments(joint: Instrument) -> tuple[Instrument, Instrument]:
    """The two marginals of an instrument on a product value-space."""
    first_labels: list[Label] = []
    second_labels: list[Label] = []
    for lab in joint.labels:
        x, y = _split_pair(lab)
        if x not in first_labels:
            first_labels.append(x)
        if y not in second_labels:
            second_labels.append(y)
    chois_i = {x: None for x in first_labels}
    chois_j = {y: None for y in second_labels}
    for lab in joint.labels:
        x, y = _split_pair(lab)
        c = joint[lab].choi
        chois_i[x] = c if chois_i[x] is None else chois_i[x] + c
        chois_j[y] = c if chois_j[y] is None else chois_j[y] + c
    i = Instrument({x: Operation.from_choi(c) for x, c in chois_i.items()})
    j = Instrument({y: Operation.from_choi(c) for y, c in chois_j.items()})
    return i, j
