"""Interaction Hamiltonians and exact unitary evolution on the joint space.

Two competing couplings are provided:

* :func:`build_effective` -- a phase-only coupling proportional to the photon
  number. It commutes with the number operator exactly, so the evolution can
  never move population between number levels.

* :func:`build_gauge_analog` -- an excitation-exchanging coupling linear in
  the field quadrature (the probe can really absorb or emit a quantum). It
  conserves the total excitation count but does not commute with the photon
  number, which is the mechanism behind measurement backaction on the number
  distribution.

Units are dimensionless with hbar = 1. Evolution operators are computed by
Hermitian eigendecomposition, which is unitary to rounding at the matrix
sizes used here. Number-conserving Hamiltonians are exponentiated block by
block so that number-off-diagonal entries of the propagator are exact zeros,
not eigensolver dust.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import ACCUMULATED_TOL, ALGEBRAIC_TOL
from .hilbert import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    HermitianOperator,
    JointSpace,
    NumericalIntegrityError,
    StateVector,
    annihilation_operator,
    number_operator,
    tensor_product,
)

# Probe level conventions: index 0 is the upper (excited) level so that
# sigma_z = diag(1, -1) and (sigma_z + 1)/2 projects onto the excited level.
PROBE_EXCITED = 0
PROBE_GROUND = 1


@dataclass(frozen=True)
class EffectiveCoupling:
    """Number-commuting coupling H = g * (n (x) probe_operator)."""

    g: float
    probe_operator: np.ndarray | None = None  # defaults to sigma_z on a two-level probe


@dataclass(frozen=True)
class GaugeAnalogCoupling:
    """Excitation-conserving coupling with detuning delta.

    H = (delta/2) (I (x) sigma_z) + g (a (x) sigma_plus + a^dag (x) sigma_minus)

    where sigma_plus promotes the probe ground level to the excited level
    while a removes one photon. delta is the probe level splitting minus the
    photon quantum; for |delta| >> g the coupling is dispersive and the probe
    acquires a phase g^2 n t / delta per unit ground-level amplitude.
    """

    g: float
    delta: float


@dataclass(frozen=True, eq=False)
class JointUnitaryTensor:
    """Four-index matrix elements u[i, j, k, l] = <i,j| U |k,l> of a joint unitary."""

    u: np.ndarray
    space: JointSpace

    def __post_init__(self):
        arr = np.array(self.u, dtype=complex)
        s, p = self.space.shape
        if arr.shape != (s, p, s, p):
            raise ValueError(f"tensor shape {arr.shape} does not match space shape {(s, p)}")
        flat = arr.reshape(s * p, s * p)
        dev = float(np.max(np.abs(flat.conj().T @ flat - np.eye(s * p))))
        if dev > ACCUMULATED_TOL:
            raise NumericalIntegrityError(
                f"tensor is not unitary (max contraction deviation {dev:.3e})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "u", arr)

    @classmethod
    def identity(cls, space: JointSpace) -> "JointUnitaryTensor":
        s, p = space.shape
        return cls(np.eye(s * p, dtype=complex).reshape(s, p, s, p), space)

    def as_matrix(self) -> np.ndarray:
        """Flat (dim x dim) matrix form under the row-major index map."""
        d = self.space.dimension
        return self.u.reshape(d, d)


def build_effective(space: JointSpace, c: EffectiveCoupling) -> HermitianOperator:
    """Assemble the number-commuting interaction g * (n (x) B).

    B defaults to sigma_z and must be Hermitian with the probe's dimension.
    The result is block diagonal in the photon number and therefore commutes
    with n (x) I exactly.
    """
    p = space.probe.dimension
    if c.probe_operator is None:
        if p != 2:
            raise ValueError("default probe operator is sigma_z; probe must be two-level")
        b = SIGMA_Z
    else:
        b = np.asarray(c.probe_operator, dtype=complex)
        if b.shape != (p, p):
            raise ValueError(f"probe operator shape {b.shape} does not match probe dimension {p}")
        if float(np.max(np.abs(b - b.conj().T))) > ALGEBRAIC_TOL:
            raise ValueError("probe operator must be Hermitian")
    mat = c.g * tensor_product(number_operator(space.system).matrix, b)
    return HermitianOperator(mat, space)


def build_gauge_analog(space: JointSpace, c: GaugeAnalogCoupling) -> HermitianOperator:
    """Assemble the excitation-conserving field-probe coupling.

    Requires a two-level probe. The free part (delta/2) sigma_z is kept so
    that the detuning controls how far the photon-exchange channel is from
    resonance; the coupling term exchanges one photon against one probe
    excitation.
    """
    if space.probe.dimension != 2:
        raise ValueError("gauge-analog coupling requires a two-level probe")
    a = annihilation_operator(space.system)
    eye_s = np.eye(space.system.dimension)
    mat = (
        0.5 * c.delta * tensor_product(eye_s, SIGMA_Z)
        + c.g * (tensor_product(a, SIGMA_PLUS) + tensor_product(a.conj().T, SIGMA_MINUS))
    )
    return HermitianOperator(mat, space)


def total_excitation_operator(space: JointSpace) -> HermitianOperator:
    """Photon number plus probe excitation: n (x) I + I (x) (sigma_z + 1)/2."""
    if space.probe.dimension != 2:
        raise ValueError("total excitation is defined for a two-level probe")
    eye_s = np.eye(space.system.dimension)
    eye_p = np.eye(2)
    mat = tensor_product(number_operator(space.system).matrix, eye_p) + tensor_product(
        eye_s, 0.5 * (SIGMA_Z + eye_p)
    )
    return HermitianOperator(mat, space)


def _expm_herm(mat: np.ndarray, t: float) -> np.ndarray:
    """exp(-i * mat * t) for Hermitian mat, exact-diagonal fast path included."""
    off = mat - np.diag(np.diag(mat))
    if not off.any():
        return np.diag(np.exp(-1j * np.diag(mat).real * t))
    vals, vecs = np.linalg.eigh(mat)
    return (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T


def evolution_matrix(h: HermitianOperator, t: float) -> np.ndarray:
    """Propagator exp(-i H t) as a flat matrix.

    When H lives on a joint space and is block diagonal in the system index
    (number-conserving couplings), each probe-sized block is exponentiated
    separately so the propagator keeps exact zeros between number sectors.
    """
    mat = h.matrix
    if isinstance(h.space, JointSpace):
        s, p = h.space.shape
        blocks = mat.reshape(s, p, s, p).transpose(0, 2, 1, 3)  # [i, k] -> p x p block
        if not blocks[~np.eye(s, dtype=bool)].any():
            out = np.zeros((s, s, p, p), dtype=complex)
            for k in range(s):
                out[k, k] = _expm_herm(blocks[k, k], t)
            return out.transpose(0, 2, 1, 3).reshape(s * p, s * p)
    return _expm_herm(mat, t)


def propagate(h: HermitianOperator, t: float, state: StateVector) -> StateVector:
    """Evolve a state: exp(-i H t) |psi>, norm preserved to rounding."""
    if state.space != h.space:
        raise ValueError("state and Hamiltonian live on different spaces")
    return StateVector(evolution_matrix(h, t) @ state.amplitudes, state.space)


def unitary_tensor(h: HermitianOperator, t: float) -> JointUnitaryTensor:
    """Four-index propagator tensor on a joint space (validated unitary)."""
    if not isinstance(h.space, JointSpace):
        raise ValueError("unitary_tensor requires a Hamiltonian on a JointSpace")
    s, p = h.space.shape
    return JointUnitaryTensor(evolution_matrix(h, t).reshape(s, p, s, p), h.space)


def commutator_norm(a: HermitianOperator, b: HermitianOperator) -> float:
    """Largest singular value of AB - BA."""
    if a.space != b.space:
        raise ValueError("operators live on different spaces")
    comm = a.matrix @ b.matrix - b.matrix @ a.matrix
    if not comm.any():
        return 0.0
    return float(np.linalg.norm(comm, 2))
