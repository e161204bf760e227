"""Quantum non-demolition photon counting: backaction, error, and detector design.

The package quantifies how the choice of field-probe interaction controls
the tradeoff between measurement error and backaction on the measured
photon-number distribution, and optimizes an interferometric detector
design against relative error/backaction targets.

Layout:

* :mod:`qndsim.hilbert` -- truncated number ladder, probe space, joint
  tensor-product machinery, states, operators, marginals.
* :mod:`qndsim.dynamics` -- the number-commuting and excitation-exchanging
  interaction Hamiltonians, exact propagators, joint unitary tensors.
* :mod:`qndsim.qnd` -- strong (commutator) and weak (distribution-shift)
  backaction conditions, the backaction metric.
* :mod:`qndsim.metrology` -- Monte-Carlo interference protocol with a
  semiclassical fast branch and an exact sequential-interaction branch.
* :mod:`qndsim.detector` -- analytic scaling laws, response range,
  information per pulse, grid design optimizer.
* :mod:`qndsim.cli` -- command-line front end (qnd-check, simulate, sweep,
  design, entropy).
"""

from .constants import ACCUMULATED_TOL, ALGEBRAIC_TOL
from .detector import (
    DesignReport,
    DesignTargets,
    DetectorDesign,
    backaction_model,
    design_report,
    entropy_bits,
    error_model,
    optimize_design,
    phase_per_photon_pulse,
    reference_calibration,
    relative_backaction,
    response_range,
    sql_check,
)
from .dynamics import (
    EffectiveCoupling,
    GaugeAnalogCoupling,
    JointUnitaryTensor,
    build_effective,
    build_gauge_analog,
    commutator_norm,
    evolution_matrix,
    propagate,
    total_excitation_operator,
    unitary_tensor,
)
from .hilbert import (
    FockSpace,
    HermitianOperator,
    JointSpace,
    NumericalIntegrityError,
    ProbabilityDistribution,
    ProbeSpace,
    StateVector,
    annihilation_operator,
    basis_state,
    fock_state,
    joint_number_operator,
    marginal_distribution,
    number_operator,
    tensor_product,
    uniform_superposition,
)
from .metrology import (
    ProtocolConfig,
    ProtocolResult,
    SweepPoint,
    error_backaction_sweep,
    phase_per_photon,
    run_protocol,
    single_probe_phase,
)
from .qnd import (
    WeakConditionReport,
    backaction_metric,
    epsilon_ba,
    final_system_marginal,
    strong_condition,
    weak_condition,
)

__version__ = "0.1.0"
