"""Backaction conditions on the measured number distribution.

Two notions are evaluated. The strong condition asks whether the interaction
Hamiltonian commutes with the measured observable; when it holds, the
measurement cannot change the observable's ensemble distribution at all.

The weak condition is quantitative: given the joint propagator tensor
u[i, j, k, l], the system state a and the probe state b, compare the final
system marginal

    p'_i = sum_j | sum_{k,l} a_k b_l u[i, j, k, l] |^2

against the initial p_i = |a_i|^2 and ask for the smallest eps such that

    |p'_i - p_i| <= (eps / 2) (p'_i + p_i)   for all i.

That infimum is ``epsilon_ba``; it lives in [0, 2], equals 0 exactly when
the distribution is unchanged on its support, and saturates at 2 when a
level is populated from (or emptied to) zero. Indices where p'_i + p_i = 0
carry no constraint and are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import ALGEBRAIC_TOL
from .dynamics import JointUnitaryTensor, commutator_norm
from .hilbert import HermitianOperator, ProbabilityDistribution, StateVector


@dataclass(frozen=True, eq=False)
class WeakConditionReport:
    """Result of evaluating the weak condition for one (u, a, b) triple.

    epsilon_ba is the infimum eps for which the condition holds;
    per_index_ratios holds 2|p'_i - p_i| / (p'_i + p_i) per level (zero on
    unconstrained levels); holds_at records the boolean verdict for any
    candidate eps values the caller supplied.
    """

    epsilon_ba: float
    per_index_ratios: np.ndarray
    holds_at: dict


def _check_inputs(u: JointUnitaryTensor, a: StateVector, b: StateVector) -> None:
    if a.space != u.space.system:
        raise ValueError("system state does not live on the tensor's system space")
    if b.space != u.space.probe:
        raise ValueError("probe state does not live on the tensor's probe space")


def final_system_marginal(
    u: JointUnitaryTensor, a: StateVector, b: StateVector
) -> ProbabilityDistribution:
    """System number distribution after one probe interaction.

    Contracts the propagator tensor with the product initial state and sums
    the squared amplitudes over the probe index.
    """
    _check_inputs(u, a, b)
    amp = np.einsum("ijkl,k,l->ij", u.u, a.amplitudes, b.amplitudes)
    p = np.sum(np.abs(amp) ** 2, axis=1)
    return ProbabilityDistribution(p, u.space.system.levels())


def relative_shift_ratios(before: np.ndarray, after: np.ndarray) -> np.ndarray:
    """Per-index ratios 2|q_i - p_i| / (q_i + p_i), zero where both vanish."""
    before = np.asarray(before, dtype=float)
    after = np.asarray(after, dtype=float)
    if before.shape != after.shape:
        raise ValueError("distributions must have the same length")
    denom = before + after
    ratios = np.zeros_like(denom)
    mask = denom > 0.0
    ratios[mask] = 2.0 * np.abs(after[mask] - before[mask]) / denom[mask]
    return ratios


def epsilon_from_distributions(before, after) -> float:
    """Infimum eps of the weak condition between two number distributions."""
    ratios = relative_shift_ratios(
        getattr(before, "probabilities", before), getattr(after, "probabilities", after)
    )
    return float(ratios.max()) if ratios.size else 0.0


def weighted_shift(before, after, weights) -> float:
    """Weighted L1 distance sum_i w_i |q_i - p_i| between two distributions."""
    p = np.asarray(getattr(before, "probabilities", before), dtype=float)
    q = np.asarray(getattr(after, "probabilities", after), dtype=float)
    w = np.asarray(weights, dtype=float)
    if not (p.shape == q.shape == w.shape):
        raise ValueError("distributions and weights must have the same length")
    return float(np.sum(w * np.abs(q - p)))


def epsilon_ba(
    u: JointUnitaryTensor, a: StateVector, b: StateVector, candidates=()
) -> WeakConditionReport:
    """Evaluate the weak condition, returning the tight eps and per-level ratios."""
    p_before = a.probabilities()
    p_after = final_system_marginal(u, a, b).probabilities
    ratios = relative_shift_ratios(p_before, p_after)
    eps = float(ratios.max()) if ratios.size else 0.0
    holds = {float(c): bool(eps <= float(c)) for c in candidates}
    return WeakConditionReport(eps, ratios, holds)


def weak_condition(
    u: JointUnitaryTensor, a: StateVector, b: StateVector, epsilon: float
) -> bool:
    """Boolean form: does the weak condition hold at the given eps?

    Defined through the same ratio computation as :func:`epsilon_ba`, so it
    is true exactly when epsilon >= epsilon_ba(u, a, b).
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    return epsilon_ba(u, a, b).epsilon_ba <= epsilon


def backaction_metric(u: JointUnitaryTensor, a: StateVector, b: StateVector) -> float:
    """Number-weighted change of the ensemble distribution, sum_n n |p'_n - p_n|.

    Zero exactly when the photon-number distribution over the ensemble is
    unchanged on all occupied levels.
    """
    p_before = a.probabilities()
    p_after = final_system_marginal(u, a, b).probabilities
    return weighted_shift(p_before, p_after, u.space.system.levels())


def strong_condition(h: HermitianOperator, q: HermitianOperator) -> bool:
    """True when the interaction commutes with the observable (zero backaction)."""
    return commutator_norm(h, q) <= ALGEBRAIC_TOL
