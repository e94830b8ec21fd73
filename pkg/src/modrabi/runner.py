"""Execute scenario configs, write CSV traces, and size the direct-observation rate."""

from __future__ import annotations

import math
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import dynamics, hilbert
from .config import FeasibilityInputs, ScenarioConfig
from .dynamics import EvolutionResult
from .floquet import bessel_j
from .hilbert import QuantumState


def available_outputs(config: ScenarioConfig) -> list[str]:
    return list(dynamics.observable_operators(config.layout))


def build_hamiltonian(config: ScenarioConfig):
    if config.layout.control_levels == 1:
        return dynamics.single_hamiltonian(config.model, config.trajectories[0], config.layout)
    return dynamics.superposed_hamiltonian(
        config.model, config.trajectories[0], config.trajectories[1], config.layout
    )


def _drive_omegas(config: ScenarioConfig) -> list[float]:
    omegas = []
    for traj in config.trajectories:
        if traj.kind == "oscillatory":
            omegas.append(traj.omega)
        elif traj.kind == "inertial":
            omegas.append(traj.wave_number * traj.velocity)
    return omegas


def initial_state(config: ScenarioConfig) -> QuantumState:
    """Ground detector and (near-)vacuum mode, on the configured control state.

    A pure ket is returned whenever the run can stay pure; a thermal mode or
    a classical control mixture forces a density matrix.
    """
    layout = config.layout
    nbar = config.lindblad.initial_thermal if config.lindblad else 0.0
    mixed_control = layout.control_levels == 2 and config.initial_control == "mixed"
    if config.lindblad is None and not mixed_control and nbar == 0.0:
        if layout.control_levels == 1:
            return QuantumState(hilbert.basis_ket(layout, 0, "g", 0), layout)
        ket = (
            hilbert.basis_ket(layout, 0, "g", 0) + hilbert.basis_ket(layout, 1, "g", 0)
        ) / math.sqrt(2.0)
        return QuantumState(ket, layout)

    if layout.control_levels == 1:
        control = np.array([[1.0]], dtype=complex)
    elif mixed_control:
        control = 0.5 * np.eye(2, dtype=complex)
    else:
        plus = hilbert.control_ket("plus")
        control = np.outer(plus, plus.conj())
    detector = np.diag([1.0, 0.0]).astype(complex)
    mode = hilbert.thermal_state(nbar, layout.fock_dim).data
    return hilbert.product_density(layout, control, detector, mode)


def run_scenario(config: ScenarioConfig, output_dir: str | Path = ".") -> tuple[EvolutionResult, Path]:
    """Evolve a scenario and write its observable traces as a CSV file.

    The CSV holds a time_us column followed by one column per requested
    observable, and is byte-identical across repeated runs of the same config.
    """
    unknown = set(config.outputs) - set(available_outputs(config))
    if unknown:
        raise ValueError(
            f"outputs {sorted(unknown)} not available for this layout; "
            f"choose from {available_outputs(config)}"
        )
    hamiltonian = build_hamiltonian(config)
    w_max = dynamics.omega_max(config.model, *_drive_omegas(config))
    dt = config.run.dt or dynamics.default_time_step(w_max, config.run.sample_interval)

    state0 = initial_state(config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # truncation is reported via the result flag
        if state0.is_pure:
            result = dynamics.evolve_unitary(
                state0, hamiltonian, config.run.t_final, dt, config.run.sample_interval
            )
        else:
            result = dynamics.evolve_lindblad(
                state0, hamiltonian, config.lindblad, config.run.t_final, dt,
                config.run.sample_interval,
            )

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = output_dir / f"{config.name}.csv"
    write_traces_csv(result, config.outputs, csv_path)
    return result, csv_path


def write_traces_csv(result: EvolutionResult, columns: tuple[str, ...], path: Path) -> None:
    lines = ["time_us," + ",".join(columns)]
    for i, t in enumerate(result.times):
        values = ",".join(f"{result.traces[c][i]:.10e}" for c in columns)
        lines.append(f"{t * 1e6:.4f},{values}")
    path.write_text("\n".join(lines) + "\n")


def feasibility_estimate(inputs: FeasibilityInputs) -> dict[str, float]:
    """Excitation rate of the vacuum-exciting term for a micromotion-driven particle.

    k = omega_p / c, u = k A, and in the small-oscillation limit (trajectory
    centered on a field node, cos u_bar = 1) the pair-creating matrix element
    is g_eff = g0 J1(u).  The angular Rabi frequency is 2 g_eff, quoted here
    as a rate in Hz and integrated over the available lifetime.
    """
    k = inputs.mode_omega / inputs.speed_of_light
    u = k * inputs.amplitude
    if u > 0.1:
        warnings.warn(
            f"u = {u:.3g} is outside the small-oscillation regime this estimate assumes",
            UserWarning,
            stacklevel=2,
        )
    g_eff = inputs.g0 * bessel_j(1, u)
    rate_hz = 2.0 * g_eff / (2.0 * math.pi)
    return {
        "u": u,
        "g_eff": g_eff,
        "rate_hz": rate_hz,
        "excitations_per_lifetime": rate_hz * inputs.lifetime,
    }


def golden_dir():
    return resources.files("modrabi") / "golden"


def list_golden() -> list[str]:
    """Names of the bundled golden configs and scan files."""
    return sorted(entry.name for entry in golden_dir().iterdir() if entry.is_file())


def golden_text(name: str) -> str:
    entry = golden_dir() / name
    if not entry.is_file():
        raise ValueError(f"no bundled golden file named {name!r}; see list-golden")
    return entry.read_text()
