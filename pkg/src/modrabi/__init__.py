"""Simulator for a two-level detector coupled to a single cavity mode through
a trajectory-modulated coupling, with superposed-worldline dynamics, open-
system decoherence, resonant effective-model analysis, and sideband
tomography of the resulting phonon distribution."""

from .config import FeasibilityInputs, RunSettings, ScenarioConfig, parse_feasibility, parse_scenario, serialize_scenario
from .dynamics import (
    EvolutionResult,
    LindbladSpec,
    ModelParams,
    coherence_decompose,
    default_time_step,
    evolve_lindblad,
    evolve_unitary,
    observables,
    single_hamiltonian,
    superposed_hamiltonian,
)
from .errors import IllConditionedFit, IntegrationError, NumericalInconsistency, TruncationWarning
from .floquet import (
    EffectiveModel,
    EffectiveTerm,
    ResonanceContext,
    bessel_j,
    displacement_condition,
    effective_hamiltonian,
    jacobi_anger_coeffs,
    rabi_period_prediction,
    rabi_rate_prediction,
    relativistic_resonance_residual,
)
from .hilbert import (
    QuantumState,
    SystemLayout,
    annihilation,
    creation,
    embed,
    expectation,
    number,
    pauli,
    projector_control,
    thermal_state,
)
from .plotting import emit_plot
from .runner import feasibility_estimate, list_golden, run_scenario
from .tomography import (
    FitResult,
    PhononDistribution,
    SidebandScan,
    basis_transform_pm,
    fit_distribution,
    mean_phonon,
    read_scan,
    shelving_projection,
    sideband_rabi_frequency,
    synthesize_scan,
    write_scan,
)
from .trajectory import TrajectorySpec, acceleration, modulation, position

__version__ = "0.1.0"
