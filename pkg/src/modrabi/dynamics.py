"""Time-dependent Hamiltonians, unitary and open-system propagation, observables.

The model frame Hamiltonian is

    H(t) = omega_p a^dag a + (omega_q/2) sigma_z + g0 sin(k x(t)) sigma_x (a + a^dag)

with hbar = 1 (all energies are angular frequencies).  For two superposed
worldlines the coupling term is conditioned on the control qubit,
sum_i g0 sin(k x_i(t)) |i_c><i_c| (x) sigma_x (a + a^dag), which is block
diagonal in the control basis: populations never cross branches.

Propagation is classical fixed-step fourth-order Runge-Kutta with H(t)
evaluated at the scheme's internal stage times; the fixed step is chosen for
bit-level reproducibility over adaptive stepping.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import hilbert, trajectory
from .errors import IntegrationError, TruncationWarning
from .hilbert import QuantumState, SystemLayout
from .trajectory import TrajectorySpec

DEFAULT_SAMPLE_INTERVAL = 2e-6  # seconds
LEAKAGE_THRESHOLD = 1e-6
DRIFT_FAILURE = 1e-6


@dataclass(frozen=True)
class ModelParams:
    """Mode, detector, and bare coupling angular frequencies (rad/s)."""

    omega_p: float
    omega_q: float
    g0: float

    def __post_init__(self):
        if min(self.omega_p, self.omega_q, self.g0) <= 0:
            raise ValueError("omega_p, omega_q and g0 must all be positive")
        if self.g0 > self.omega_p / 10.0:
            warnings.warn(
                "g0 exceeds omega_p/10: the resonant effective model assumes "
                "g0 << {omega_p, omega_q}",
                UserWarning,
                stacklevel=2,
            )

    @property
    def omega_sum(self) -> float:
        return self.omega_p + self.omega_q


@dataclass(frozen=True)
class LindbladSpec:
    """Dephasing and heating channels with measured rates.

    Dephasing uses jump operator sigma_z at rate 1/(2 T2) so that detector
    coherences decay as exp(-t/T2); for a two-control layout each branch may
    carry its own scale factor.  Heating uses jump operators a^dag and a at
    the same rate (quanta/s), giving d<N>/dt equal to the measured rate.
    """

    t2: float = math.inf
    heating_rate: float = 0.0
    initial_thermal: float = 0.0
    dephasing_weights: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if not self.t2 > 0:
            raise ValueError("t2 must be positive (math.inf disables dephasing)")
        if self.heating_rate < 0:
            raise ValueError("heating_rate must be >= 0")
        if self.initial_thermal < 0:
            raise ValueError("initial_thermal must be >= 0")
        if len(self.dephasing_weights) != 2:
            raise ValueError("dephasing_weights must carry one factor per control branch")


@dataclass
class EvolutionResult:
    """Sampled observable traces plus conservation and truncation diagnostics.

    drift is the largest deviation of the norm (pure runs) or the trace
    (density runs) from 1 over the sample grid; renormalization is never
    applied.  truncation_flag marks runs whose top-two-Fock-level population
    exceeded the leakage guard.
    """

    times: np.ndarray
    traces: dict[str, np.ndarray]
    leakage_max: float
    truncation_flag: bool
    drift: float
    final_state: QuantumState
    min_eigenvalue: float | None = None
    states: list[QuantumState] | None = field(default=None, repr=False)


def omega_max(params: ModelParams, *drive_omegas: float) -> float:
    """Fastest angular frequency in the problem: max of wp, wq, wp+wq, drives."""
    return max(params.omega_p, params.omega_q, params.omega_sum, *drive_omegas, 0.0)


def default_time_step(w_max: float, sample_interval: float = DEFAULT_SAMPLE_INTERVAL) -> float:
    """Largest dt <= 2 pi / (200 w_max) that divides the sampling interval exactly."""
    if w_max <= 0:
        raise ValueError("w_max must be positive")
    dt_cap = 2.0 * math.pi / (200.0 * w_max)
    n = max(1, math.ceil(sample_interval / dt_cap - 1e-12))
    return sample_interval / n


def single_hamiltonian(params: ModelParams, traj: TrajectorySpec, layout: SystemLayout):
    """H(t) builder for one worldline on a single-control layout."""
    if layout.control_levels != 1:
        raise ValueError("single_hamiltonian requires a single-control layout")
    h0, coupling = _static_parts(params, layout)

    def h(t: float) -> np.ndarray:
        return h0 + (params.g0 * trajectory.modulation(traj, t)) * coupling

    return h


def superposed_hamiltonian(
    params: ModelParams,
    traj0: TrajectorySpec,
    traj1: TrajectorySpec,
    layout: SystemLayout,
):
    """H(t) builder with the coupling conditioned on the control qubit."""
    if layout.control_levels != 2:
        raise ValueError("superposed_hamiltonian requires a two-control-level layout")
    h0, coupling = _static_parts(params, layout)
    v0 = hilbert.projector_control("0", layout) @ coupling
    v1 = hilbert.projector_control("1", layout) @ coupling

    def h(t: float) -> np.ndarray:
        m0 = params.g0 * trajectory.modulation(traj0, t)
        m1 = params.g0 * trajectory.modulation(traj1, t)
        return h0 + m0 * v0 + m1 * v1

    return h


def _static_parts(params: ModelParams, layout: SystemLayout):
    n_op = hilbert.embed(layout, "mode", hilbert.number(layout.fock_dim))
    sz = hilbert.embed(layout, "detector", hilbert.pauli("z"))
    sx = hilbert.embed(layout, "detector", hilbert.pauli("x"))
    quad = hilbert.embed(
        layout, "mode", hilbert.annihilation(layout.fock_dim) + hilbert.creation(layout.fock_dim)
    )
    h0 = params.omega_p * n_op + 0.5 * params.omega_q * sz
    return h0, sx @ quad


def observable_operators(layout: SystemLayout) -> dict[str, np.ndarray]:
    """Named Hermitian operators sampled during evolution.

    Always <sigma_z> and <N>; two-control layouts add the branch populations
    and the unnormalized projected expectations <P_i (x) O> for
    i in {0, 1, plus, minus} and O in {sigma_z, N}.
    """
    sz = hilbert.embed(layout, "detector", hilbert.pauli("z"))
    n_op = hilbert.embed(layout, "mode", hilbert.number(layout.fock_dim))
    ops = {"sigma_z": sz, "n": n_op}
    if layout.control_levels == 2:
        for label in ("0", "1", "plus", "minus"):
            proj = hilbert.projector_control(label, layout)
            key = {"0": "p0", "1": "p1", "plus": "pplus", "minus": "pminus"}[label]
            ops[key] = proj
            ops[f"{key}_sigma_z"] = proj @ sz
            ops[f"{key}_n"] = proj @ n_op
    return ops


def observables(state: QuantumState) -> dict[str, float]:
    """Evaluate the full observable map for a composite-system state."""
    if state.layout is None:
        raise ValueError("observables requires a state with a SystemLayout")
    ops = observable_operators(state.layout)
    return {name: _fast_expectation(state.data, op) for name, op in ops.items()}


def coherence_decompose(state: QuantumState, op: np.ndarray) -> tuple[float, float]:
    """Split a projected expectation into branch-mixture and interference parts.

    mix = <P_plus (x) O> + <P_minus (x) O> is what an incoherent mixture of
    the two worldlines would give; coh = <P_plus (x) O> - <P_minus (x) O>
    is nonzero only for a coherent superposition.
    """
    if state.layout is None or state.layout.control_levels != 2:
        raise ValueError("coherence_decompose requires a two-control-level state")
    plus = _fast_expectation(state.data, hilbert.projector_control("plus", state.layout) @ op)
    minus = _fast_expectation(state.data, hilbert.projector_control("minus", state.layout) @ op)
    return plus + minus, plus - minus


def _fast_expectation(data: np.ndarray, op: np.ndarray) -> float:
    if data.ndim == 1:
        return float(np.vdot(data, op @ data).real)
    return float(np.einsum("ij,ji->", op, data).real)


def _sample_grid(t_final: float, dt: float, sample_interval: float) -> tuple[int, int]:
    if t_final <= 0 or dt <= 0 or sample_interval <= 0:
        raise ValueError("t_final, dt and sample_interval must be positive")
    steps_per_sample = round(sample_interval / dt)
    if steps_per_sample < 1 or abs(steps_per_sample * dt - sample_interval) > 1e-9 * sample_interval:
        raise ValueError(f"dt={dt} does not divide the sampling interval {sample_interval}")
    n_samples = round(t_final / sample_interval)
    if n_samples < 1 or abs(n_samples * sample_interval - t_final) > 1e-9 * t_final:
        raise ValueError(f"sample_interval={sample_interval} does not divide t_final={t_final}")
    return n_samples, steps_per_sample


def evolve_unitary(
    state0: QuantumState,
    hamiltonian,
    t_final: float,
    dt: float,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    store_states: bool = False,
) -> EvolutionResult:
    """Integrate i d|psi>/dt = H(t)|psi> with fixed-step RK4.

    H is sampled at the internal stage times t, t + dt/2 and t + dt.  The
    norm is measured (never restored); drift beyond 1e-6 aborts the run, and
    Fock leakage beyond the truncation guard flags the result.
    """
    if not state0.is_pure:
        raise ValueError("evolve_unitary requires a pure initial state")
    if state0.layout is None:
        raise ValueError("evolve_unitary requires a state with a SystemLayout")
    layout = state0.layout
    n_samples, steps_per_sample = _sample_grid(t_final, dt, sample_interval)
    ops = observable_operators(layout)

    psi = state0.data.astype(complex).copy()
    times = np.arange(n_samples + 1) * sample_interval
    traces = {name: np.empty(n_samples + 1) for name in ops}
    states: list[QuantumState] | None = [] if store_states else None

    drift = 0.0
    leakage_max = 0.0

    def record(idx: int, vec: np.ndarray):
        nonlocal drift, leakage_max
        for name, op in ops.items():
            traces[name][idx] = _fast_expectation(vec, op)
        drift = max(drift, abs(np.linalg.norm(vec) - 1.0))
        leakage_max = max(leakage_max, hilbert.leakage_population(vec, layout))
        if states is not None:
            states.append(QuantumState(vec.copy(), layout, tol=10 * DRIFT_FAILURE))

    record(0, psi)
    step = 0
    for sample in range(1, n_samples + 1):
        for _ in range(steps_per_sample):
            t = step * dt
            h_t = hamiltonian(t)
            h_mid = hamiltonian(t + 0.5 * dt)
            k1 = -1j * (h_t @ psi)
            k2 = -1j * (h_mid @ (psi + (0.5 * dt) * k1))
            k3 = -1j * (h_mid @ (psi + (0.5 * dt) * k2))
            k4 = -1j * (hamiltonian(t + dt) @ (psi + dt * k3))
            psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            step += 1
        record(sample, psi)

    if drift > DRIFT_FAILURE:
        raise IntegrationError(f"norm drift {drift:.3e} exceeds {DRIFT_FAILURE:.0e}")
    flagged = leakage_max > LEAKAGE_THRESHOLD
    if flagged:
        warnings.warn(
            f"Fock truncation leakage {leakage_max:.3e} exceeds {LEAKAGE_THRESHOLD:.0e}",
            TruncationWarning,
            stacklevel=2,
        )
    return EvolutionResult(
        times=times,
        traces=traces,
        leakage_max=leakage_max,
        truncation_flag=flagged,
        drift=drift,
        final_state=QuantumState(psi, layout, tol=10 * DRIFT_FAILURE),
        states=states,
    )


def jump_operators(lind: LindbladSpec, layout: SystemLayout) -> list[tuple[float, np.ndarray]]:
    """(rate, jump operator) pairs for the configured channels."""
    channels: list[tuple[float, np.ndarray]] = []
    if math.isfinite(lind.t2):
        sz = hilbert.pauli("z")
        if layout.control_levels == 1:
            deph = hilbert.embed(layout, "detector", sz)
        else:
            w0, w1 = lind.dephasing_weights
            branch = np.diag([w0, w1]).astype(complex)
            deph = hilbert.embed(layout, "control", branch) @ hilbert.embed(
                layout, "detector", sz
            )
        channels.append((1.0 / (2.0 * lind.t2), deph))
    if lind.heating_rate > 0:
        up = hilbert.embed(layout, "mode", hilbert.creation(layout.fock_dim))
        down = hilbert.embed(layout, "mode", hilbert.annihilation(layout.fock_dim))
        channels.append((lind.heating_rate, up))
        channels.append((lind.heating_rate, down))
    return channels


def evolve_lindblad(
    rho0: QuantumState,
    hamiltonian,
    lind: LindbladSpec | None,
    t_final: float,
    dt: float,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    store_states: bool = False,
) -> EvolutionResult:
    """Integrate the Lindblad master equation with fixed-step RK4.

    hamiltonian may be None for pure-relaxation runs, and lind may be None
    for von-Neumann evolution of a density matrix.  The trace is measured at
    every sample (drift beyond 1e-6 aborts) and the smallest eigenvalue over
    the sample grid is recorded as a positivity diagnostic.
    """
    if rho0.is_pure:
        raise ValueError("evolve_lindblad requires a density-matrix initial state")
    if rho0.layout is None:
        raise ValueError("evolve_lindblad requires a state with a SystemLayout")
    layout = rho0.layout
    n_samples, steps_per_sample = _sample_grid(t_final, dt, sample_interval)
    ops = observable_operators(layout)
    channels = jump_operators(lind, layout) if lind is not None else []
    # precompute L, L^dag and L^dag L once per channel
    prepared = [(rate, L, L.conj().T, L.conj().T @ L) for rate, L in channels]

    def rhs(h: np.ndarray | None, rho: np.ndarray) -> np.ndarray:
        if h is None:
            out = np.zeros_like(rho)
        else:
            out = -1j * (h @ rho - rho @ h)
        for rate, L, Ld, LdL in prepared:
            out += rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
        return out

    rho = rho0.data.astype(complex).copy()
    times = np.arange(n_samples + 1) * sample_interval
    traces = {name: np.empty(n_samples + 1) for name in ops}
    states: list[QuantumState] | None = [] if store_states else None

    drift = 0.0
    leakage_max = 0.0
    min_eig = np.inf

    def record(idx: int, mat: np.ndarray):
        nonlocal drift, leakage_max, min_eig
        for name, op in ops.items():
            traces[name][idx] = _fast_expectation(mat, op)
        drift = max(drift, abs(np.trace(mat).real - 1.0))
        leakage_max = max(leakage_max, hilbert.leakage_population(mat, layout))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)).min()))
        if states is not None:
            states.append(QuantumState(mat.copy(), layout, tol=10 * DRIFT_FAILURE))

    record(0, rho)
    step = 0
    for sample in range(1, n_samples + 1):
        for _ in range(steps_per_sample):
            t = step * dt
            h_t = hamiltonian(t) if hamiltonian is not None else None
            h_mid = hamiltonian(t + 0.5 * dt) if hamiltonian is not None else None
            h_end = hamiltonian(t + dt) if hamiltonian is not None else None
            k1 = rhs(h_t, rho)
            k2 = rhs(h_mid, rho + (0.5 * dt) * k1)
            k3 = rhs(h_mid, rho + (0.5 * dt) * k2)
            k4 = rhs(h_end, rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            step += 1
        record(sample, rho)

    if drift > DRIFT_FAILURE:
        raise IntegrationError(f"trace drift {drift:.3e} exceeds {DRIFT_FAILURE:.0e}")
    flagged = leakage_max > LEAKAGE_THRESHOLD
    if flagged:
        warnings.warn(
            f"Fock truncation leakage {leakage_max:.3e} exceeds {LEAKAGE_THRESHOLD:.0e}",
            TruncationWarning,
            stacklevel=2,
        )
    return EvolutionResult(
        times=times,
        traces=traces,
        leakage_max=leakage_max,
        truncation_flag=flagged,
        drift=drift,
        final_state=QuantumState(rho, layout, tol=10 * DRIFT_FAILURE),
        min_eigenvalue=float(min_eig),
        states=states,
    )
