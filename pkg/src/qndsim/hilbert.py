"""Finite-dimensional state spaces and operators for the photon-probe model.

The measured system is a photon mode truncated to a finite number ladder;
the probe is a small discrete system (two levels for the interferometer
models used elsewhere in this package). Joint objects live on the tensor
product with a fixed row-major index map, system index outermost.

All container types are immutable after construction and validate their
defining invariants, raising :class:`NumericalIntegrityError` when a
numerical invariant (normalization, hermiticity, distribution sum) is
violated and :class:`ValueError` on structural misuse (dimension
mismatches, bad arguments).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .constants import ACCUMULATED_TOL, ALGEBRAIC_TOL


class NumericalIntegrityError(RuntimeError):
    """A numerical invariant was violated (norm, hermiticity, unitarity, probability sum)."""


# Pauli matrices in the basis (|0>, |1>) with |0> the upper level.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS):
    _m.setflags(write=False)
del _m


@dataclass(frozen=True)
class FockSpace:
    """Photon-number ladder truncated at ``cutoff`` (dimension ``cutoff + 1``)."""

    cutoff: int

    def __post_init__(self):
        if not isinstance(self.cutoff, (int, np.integer)) or self.cutoff < 1:
            raise ValueError(f"cutoff must be an integer >= 1, got {self.cutoff!r}")

    @property
    def dimension(self) -> int:
        return self.cutoff + 1

    def levels(self) -> np.ndarray:
        """Photon numbers labelling the basis states, 0 .. cutoff."""
        return np.arange(self.cutoff + 1)


@dataclass(frozen=True)
class ProbeSpace:
    """Discrete probe degree of freedom; two levels model the interferometer arms."""

    dim: int = 2

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 2:
            raise ValueError(f"probe dimension must be an integer >= 2, got {self.dim!r}")

    @property
    def dimension(self) -> int:
        return self.dim


@dataclass(frozen=True)
class JointSpace:
    """Tensor product of system and probe with a row-major (system-outer) index map."""

    system: FockSpace
    probe: ProbeSpace

    @property
    def dimension(self) -> int:
        return self.system.dimension * self.probe.dimension

    @property
    def shape(self) -> tuple[int, int]:
        return (self.system.dimension, self.probe.dimension)

    def flat_index(self, k: int, ell: int) -> int:
        """Flat index of basis state (system k, probe ell)."""
        if not (0 <= k < self.system.dimension and 0 <= ell < self.probe.dimension):
            raise ValueError(f"basis indices ({k}, {ell}) out of range for {self.shape}")
        return k * self.probe.dimension + ell

    def split_index(self, i: int) -> tuple[int, int]:
        """Inverse of :meth:`flat_index`."""
        if not 0 <= i < self.dimension:
            raise ValueError(f"flat index {i} out of range for dimension {self.dimension}")
        return divmod(i, self.probe.dimension)


Space = Union[FockSpace, ProbeSpace, JointSpace]


def _as_readonly_complex(values, dim_expected: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"amplitudes must be a 1-D vector, got shape {arr.shape}")
    if dim_expected is not None and arr.shape[0] != dim_expected:
        raise ValueError(
            f"amplitude vector has length {arr.shape[0]}, expected {dim_expected}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over a declared space."""

    amplitudes: np.ndarray
    space: Space

    def __post_init__(self):
        arr = _as_readonly_complex(self.amplitudes, self.space.dimension)
        object.__setattr__(self, "amplitudes", arr)
        norm_sq = float(np.sum(np.abs(arr) ** 2))
        if abs(norm_sq - 1.0) > ALGEBRAIC_TOL:
            raise NumericalIntegrityError(
                f"state not normalized: sum |a|^2 = {norm_sq!r}"
            )

    @classmethod
    def normalized(cls, amplitudes, space: Space) -> "StateVector":
        """Build a state from arbitrary amplitudes, dividing out the norm."""
        arr = np.array(amplitudes, dtype=complex)
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(arr / norm, space)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def basis_state(space: Space, index: int) -> StateVector:
    """Computational basis state |index> of the given space."""
    amps = np.zeros(space.dimension, dtype=complex)
    if not 0 <= index < space.dimension:
        raise ValueError(f"basis index {index} out of range for dimension {space.dimension}")
    amps[index] = 1.0
    return StateVector(amps, space)


def fock_state(space: FockSpace, n: int) -> StateVector:
    """Photon-number eigenstate |n>."""
    return basis_state(space, n)


def uniform_superposition(space: Space, indices) -> StateVector:
    """Equal-amplitude superposition of the listed basis states."""
    indices = list(indices)
    if not indices:
        raise ValueError("need at least one basis index")
    amps = np.zeros(space.dimension, dtype=complex)
    for k in indices:
        if not 0 <= k < space.dimension:
            raise ValueError(f"basis index {k} out of range for dimension {space.dimension}")
        amps[k] = 1.0
    return StateVector(amps / np.sqrt(len(indices)), space)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Complex square matrix equal to its conjugate transpose, over a declared space."""

    matrix: np.ndarray
    space: Space

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        d = self.space.dimension
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match space dimension {d}")
        dev = float(np.max(np.abs(mat - mat.conj().T))) if d else 0.0
        if dev > ALGEBRAIC_TOL:
            raise NumericalIntegrityError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def expectation(self, state: StateVector) -> float:
        """Real expectation value <psi|H|psi>."""
        if state.space != self.space:
            raise ValueError("state and operator live on different spaces")
        return float(np.real(np.vdot(state.amplitudes, self.matrix @ state.amplitudes)))


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """Nonnegative weights summing to one, indexed by physical labels."""

    probabilities: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim != 1:
            raise ValueError(f"probabilities must be 1-D, got shape {p.shape}")
        if p.size and float(p.min()) < 0.0:
            if float(p.min()) < -ALGEBRAIC_TOL:
                raise NumericalIntegrityError(
                    f"negative probability {p.min()!r}"
                )
            p = np.clip(p, 0.0, None)
        total = float(p.sum())
        if abs(total - 1.0) > ACCUMULATED_TOL:
            raise NumericalIntegrityError(f"probabilities sum to {total!r}, not 1")
        labels = self.labels
        labels = np.arange(p.size) if labels is None else np.array(labels)
        if labels.shape != p.shape:
            raise ValueError("labels and probabilities must have the same length")
        p.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "labels", labels)

    def mean(self) -> float:
        """Label-weighted mean (e.g. mean photon number)."""
        return float(np.sum(np.asarray(self.labels, dtype=float) * self.probabilities))


def _unwrap(op) -> np.ndarray:
    if isinstance(op, HermitianOperator):
        return op.matrix
    arr = np.asarray(op, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {arr.shape}")
    return arr


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product of a system operator and a probe operator.

    The composition is consistent with the row-major joint index map: entry
    ((k, l), (k', l')) of the result is ``a[k, k'] * b[l, l']``.
    """
    return np.kron(_unwrap(a), _unwrap(b))


def number_operator(space: FockSpace) -> HermitianOperator:
    """Photon number operator diag(0, 1, ..., cutoff)."""
    return HermitianOperator(np.diag(space.levels().astype(complex)), space)


def annihilation_operator(space: FockSpace) -> np.ndarray:
    """Lowering operator with a[n-1, n] = sqrt(n); a^dag a matches the number
    operator everywhere below the truncation level."""
    n = space.dimension
    a = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        a[k - 1, k] = np.sqrt(k)
    return a


def joint_number_operator(space: JointSpace) -> HermitianOperator:
    """Photon number acting on the joint space: n (x) identity."""
    mat = tensor_product(
        number_operator(space.system).matrix, np.eye(space.probe.dimension)
    )
    return HermitianOperator(mat, space)


def marginal_distribution(state: StateVector, which: str) -> ProbabilityDistribution:
    """Marginal outcome distribution of a joint state over system or probe.

    Parameters
    ----------
    state : StateVector
        Normalized state on a :class:`JointSpace`.
    which : str
        "system" for p_i = sum_j |amp(i, j)|^2, "probe" for the transpose.
    """
    if not isinstance(state.space, JointSpace):
        raise ValueError("marginal_distribution requires a state on a JointSpace")
    norm_sq = float(np.sum(np.abs(state.amplitudes) ** 2))
    if abs(norm_sq - 1.0) > ACCUMULATED_TOL:
        raise NumericalIntegrityError(f"state norm^2 = {norm_sq!r} beyond tolerance")
    grid = state.amplitudes.reshape(state.space.shape)
    if which == "system":
        p = np.sum(np.abs(grid) ** 2, axis=1)
        labels = state.space.system.levels()
    elif which == "probe":
        p = np.sum(np.abs(grid) ** 2, axis=0)
        labels = np.arange(state.space.probe.dimension)
    else:
        raise ValueError(f"which must be 'system' or 'probe', got {which!r}")
    return ProbabilityDistribution(p, labels)
