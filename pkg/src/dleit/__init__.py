"""Simulation and optimization toolkit for the phase-dependent double-lambda
EIT medium: closed-form steady-state propagation, time-domain pulse
dynamics, phase-jump analysis, and cross-phase-modulation / amplification
optimizers."""

__version__ = "0.1.0"

from .model import (
    Coherences,
    DleitError,
    FieldPair,
    ParameterError,
    SystemParams,
    WeakFieldWarning,
    canonical_phase,
    params_with_relative_phase,
    phase_separation,
    relative_phase,
    validate,
)
from .steady_state import (
    PropagationConstants,
    SingularSystemError,
    TransferMatrix,
    coherences,
    coherences_general,
    coupling_matrix,
    eit_exit_ratio,
    eit_spectrum,
    propagate_balanced,
    propagation_constants,
    transfer_matrix,
    transmission_phase,
)
from .phase_analysis import (
    JumpParameters,
    PhaseTrace,
    TargetInfeasibleError,
    XpmMetric,
    critical_depth,
    half_pi_phase_candidates,
    jump_parameters,
    jump_phases,
    phase_trace,
    pi_phase_relative,
    unwrap_phase,
    xpm_metric,
)
from .dynamics import (
    GridError,
    Plateau,
    PlateauWindowError,
    PulseRecord,
    PulseSpec,
    SimGrid,
    SimulationDivergedError,
    ZeroExitEnergyError,
    group_delay,
    plateau_extract,
    simulate,
    validate_grid,
)
from .optimize import (
    Optimum,
    OptimizeError,
    ScanResult,
    evaluate_point,
    optimize_amplification,
    optimize_phase_target,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
