"""Simulator for pulse-controlled almost-exact state transmission through an
XY spin chain whose spins couple to independent non-Markovian finite
temperature baths."""

from .bath import (
    BathParams,
    OBarSet,
    WeakCouplingWarning,
    correlation_alpha_w,
    correlation_alpha_z,
    obar_rhs,
)
from .configfile import ConfigError, load_scenario, parse_scenario
from .control import (
    PulseSpec,
    ReferenceTrajectory,
    check_effective,
    effective_intensities,
    leo_hamiltonian,
    pst_trajectory,
    pulse_value,
)
from .harness import (
    IntensityNotAchievableError,
    MinIntensityResult,
    PinResult,
    PinningError,
    ResultRow,
    Scenario,
    emit_figure_data,
    find_min_intensity,
    pin_intensity,
    preset_names,
    preset_scenario,
    run_scenario,
)
from .metrics import (
    CostReport,
    InconsistentTrajectoryError,
    InvalidDensityError,
    QsltReport,
    bures_angle,
    fidelity,
    hs_norm,
    instantaneous_cost,
    operator_norm,
    qslt,
    total_cost,
)
from .operators import (
    ChainSpec,
    basis_state,
    build_xy_hamiltonian,
    excitation_number,
    pauli_site,
    pst_couplings,
    state_index,
    uniform_couplings,
)
from .propagator import (
    NumericalInstabilityError,
    SimConfig,
    Trajectory,
    build_lindblad_ops,
    evolve,
    lindblad_rhs,
    master_rhs,
    plan_time_grid,
)

__version__ = "0.1.0"
