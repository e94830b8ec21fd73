"""Declarative scenario configs: strict YAML with explicit unit suffixes.

Every physical quantity carries its unit in the key name and frequencies are
always quoted as nu = omega/2pi (the _over_2pi_* suffix), so a config is
unambiguous about the 2pi convention.  Unknown keys are rejected at every
level; the exact grammar is documented in the README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml
from scipy.constants import c as SPEED_OF_LIGHT

from .dynamics import LindbladSpec, ModelParams
from .hilbert import SystemLayout
from .trajectory import TrajectorySpec

TWO_PI = 2.0 * math.pi

CONTROL_INITIALS = ("plus", "mixed")


@dataclass(frozen=True)
class RunSettings:
    t_final: float
    sample_interval: float = 2e-6
    dt: float | None = None

    def __post_init__(self):
        if self.t_final <= 0 or self.sample_interval <= 0:
            raise ValueError("t_final and sample_interval must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive when given")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    layout: SystemLayout
    model: ModelParams
    trajectories: tuple[TrajectorySpec, ...]
    run: RunSettings
    outputs: tuple[str, ...]
    lindblad: LindbladSpec | None = None
    initial_control: str = "plus"
    seed: int = 0

    def __post_init__(self):
        if len(self.trajectories) != self.layout.control_levels:
            raise ValueError(
                f"{self.layout.control_levels} control level(s) require "
                f"{self.layout.control_levels} trajectory(ies), got {len(self.trajectories)}"
            )
        if self.initial_control not in CONTROL_INITIALS:
            raise ValueError(f"initial_control must be one of {CONTROL_INITIALS}")
        if not self.outputs:
            raise ValueError("outputs must name at least one observable column")


def _require_map(node, where: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(node, dict):
        raise ValueError(f"{where}: expected a key/value map")
    unknown = set(node) - allowed
    if unknown:
        raise ValueError(f"{where}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")
    missing = required - set(node)
    if missing:
        raise ValueError(f"{where}: missing required key(s) {sorted(missing)}")
    return node


def _number(node, where: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ValueError(f"{where}: expected a number, got {node!r}")
    return float(node)


def _parse_trajectory(node, where: str) -> TrajectorySpec:
    kind = node.get("kind") if isinstance(node, dict) else None
    if kind == "oscillatory":
        _require_map(
            node, where, {"kind", "u", "u_bar_rad", "drive_freq_over_2pi_khz"},
            {"kind", "u", "drive_freq_over_2pi_khz"},
        )
        return TrajectorySpec.oscillatory(
            u=_number(node["u"], f"{where}.u"),
            omega=TWO_PI * 1e3 * _number(node["drive_freq_over_2pi_khz"], where),
            u_bar=_number(node.get("u_bar_rad", TWO_PI), f"{where}.u_bar_rad"),
        )
    if kind == "static":
        _require_map(node, where, {"kind", "u_bar_rad"}, {"kind"})
        return TrajectorySpec.static(u_bar=_number(node.get("u_bar_rad", TWO_PI), where))
    if kind == "inertial":
        _require_map(node, where, {"kind", "kv_over_2pi_khz"}, {"kind", "kv_over_2pi_khz"})
        return TrajectorySpec.inertial(kv=TWO_PI * 1e3 * _number(node["kv_over_2pi_khz"], where))
    raise ValueError(f"{where}: kind must be 'static', 'inertial' or 'oscillatory'")


def parse_scenario(text: str) -> ScenarioConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValueError(f"config is not valid YAML: {exc}") from exc
    top = _require_map(
        doc,
        "scenario",
        {"name", "layout", "model", "trajectories", "lindblad", "initial_control",
         "run", "outputs", "seed"},
        {"name", "layout", "model", "trajectories", "run", "outputs"},
    )

    lay = _require_map(top["layout"], "layout", {"control_levels", "fock_dim"},
                       {"control_levels", "fock_dim"})
    layout = SystemLayout(control_levels=int(lay["control_levels"]), fock_dim=int(lay["fock_dim"]))

    mod = _require_map(
        top["model"], "model",
        {"mode_freq_over_2pi_khz", "qubit_freq_over_2pi_khz", "coupling_over_2pi_khz"},
        {"mode_freq_over_2pi_khz", "qubit_freq_over_2pi_khz", "coupling_over_2pi_khz"},
    )
    model = ModelParams(
        omega_p=TWO_PI * 1e3 * _number(mod["mode_freq_over_2pi_khz"], "model"),
        omega_q=TWO_PI * 1e3 * _number(mod["qubit_freq_over_2pi_khz"], "model"),
        g0=TWO_PI * 1e3 * _number(mod["coupling_over_2pi_khz"], "model"),
    )

    if not isinstance(top["trajectories"], list) or not top["trajectories"]:
        raise ValueError("trajectories: expected a non-empty list")
    trajectories = tuple(
        _parse_trajectory(item, f"trajectories[{i}]")
        for i, item in enumerate(top["trajectories"])
    )

    lindblad = None
    if top.get("lindblad") is not None:
        lin = _require_map(
            top["lindblad"], "lindblad",
            {"t2_ms", "heating_quanta_per_s", "initial_thermal_nbar", "dephasing_weights"},
            set(),
        )
        weights = lin.get("dephasing_weights", [1.0, 1.0])
        if not isinstance(weights, list) or len(weights) != 2:
            raise ValueError("lindblad.dephasing_weights: expected a list of two numbers")
        lindblad = LindbladSpec(
            t2=1e-3 * _number(lin["t2_ms"], "lindblad") if "t2_ms" in lin else math.inf,
            heating_rate=_number(lin.get("heating_quanta_per_s", 0.0), "lindblad"),
            initial_thermal=_number(lin.get("initial_thermal_nbar", 0.0), "lindblad"),
            dephasing_weights=(float(weights[0]), float(weights[1])),
        )

    run_map = _require_map(
        top["run"], "run", {"t_final_us", "sample_interval_us", "dt_us"}, {"t_final_us"}
    )
    run = RunSettings(
        t_final=1e-6 * _number(run_map["t_final_us"], "run"),
        sample_interval=1e-6 * _number(run_map.get("sample_interval_us", 2.0), "run"),
        dt=1e-6 * _number(run_map["dt_us"], "run") if "dt_us" in run_map else None,
    )

    outputs = top["outputs"]
    if not isinstance(outputs, list) or not all(isinstance(s, str) for s in outputs):
        raise ValueError("outputs: expected a list of observable names")

    seed = top.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValueError("seed: expected an integer")

    return ScenarioConfig(
        name=str(top["name"]),
        layout=layout,
        model=model,
        trajectories=trajectories,
        run=run,
        outputs=tuple(outputs),
        lindblad=lindblad,
        initial_control=top.get("initial_control", "plus"),
        seed=seed,
    )


def serialize_scenario(config: ScenarioConfig) -> str:
    """Emit the canonical YAML form; parse(serialize(c)) == c."""
    doc: dict = {
        "name": config.name,
        "layout": {
            "control_levels": config.layout.control_levels,
            "fock_dim": config.layout.fock_dim,
        },
        "model": {
            "mode_freq_over_2pi_khz": config.model.omega_p / (TWO_PI * 1e3),
            "qubit_freq_over_2pi_khz": config.model.omega_q / (TWO_PI * 1e3),
            "coupling_over_2pi_khz": config.model.g0 / (TWO_PI * 1e3),
        },
        "trajectories": [_trajectory_doc(t) for t in config.trajectories],
        "run": {
            "t_final_us": config.run.t_final * 1e6,
            "sample_interval_us": config.run.sample_interval * 1e6,
        },
        "outputs": list(config.outputs),
        "seed": config.seed,
    }
    if config.run.dt is not None:
        doc["run"]["dt_us"] = config.run.dt * 1e6
    if config.lindblad is not None:
        lin: dict = {}
        if math.isfinite(config.lindblad.t2):
            lin["t2_ms"] = config.lindblad.t2 * 1e3
        lin["heating_quanta_per_s"] = config.lindblad.heating_rate
        lin["initial_thermal_nbar"] = config.lindblad.initial_thermal
        lin["dephasing_weights"] = list(config.lindblad.dephasing_weights)
        doc["lindblad"] = lin
    if config.layout.control_levels == 2:
        doc["initial_control"] = config.initial_control
    return yaml.safe_dump(doc, sort_keys=False)


def _trajectory_doc(traj: TrajectorySpec) -> dict:
    if traj.kind == "oscillatory":
        return {
            "kind": "oscillatory",
            "u": traj.u,
            "u_bar_rad": traj.u_bar,
            "drive_freq_over_2pi_khz": traj.omega / (TWO_PI * 1e3),
        }
    if traj.kind == "static":
        return {"kind": "static", "u_bar_rad": traj.u_bar}
    return {
        "kind": "inertial",
        "kv_over_2pi_khz": traj.wave_number * traj.velocity / (TWO_PI * 1e3),
    }


@dataclass(frozen=True)
class FeasibilityInputs:
    """Inputs of the direct-observation rate estimate.

    The mode frequency defaults to the resonance condition omega_p =omega -
    omega_q when omitted.  The bare coupling g0 is an input: the cavity
    quality factor and mode volume that would fix it are not modeled here.
    """

    name: str
    omega: float
    omega_q: float
    amplitude: float
    g0: float
    lifetime: float
    omega_p: float | None = None
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if min(self.omega, self.omega_q, self.amplitude, self.g0, self.lifetime) <= 0:
            raise ValueError("all feasibility inputs must be positive")
        if self.omega_p is not None and self.omega_p <= 0:
            raise ValueError("omega_p must be positive when given")

    @property
    def mode_omega(self) -> float:
        return self.omega - self.omega_q if self.omega_p is None else self.omega_p


def parse_feasibility(text: str) -> FeasibilityInputs:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValueError(f"config is not valid YAML: {exc}") from exc
    top = _require_map(
        doc,
        "feasibility",
        {"name", "drive_freq_over_2pi_ghz", "qubit_freq_over_2pi_mhz",
         "mode_freq_over_2pi_ghz", "amplitude_um", "coupling_over_2pi_hz", "lifetime_s"},
        {"name", "drive_freq_over_2pi_ghz", "qubit_freq_over_2pi_mhz",
         "amplitude_um", "coupling_over_2pi_hz", "lifetime_s"},
    )
    omega_p = None
    if "mode_freq_over_2pi_ghz" in top:
        omega_p = TWO_PI * 1e9 * _number(top["mode_freq_over_2pi_ghz"], "feasibility")
    return FeasibilityInputs(
        name=str(top["name"]),
        omega=TWO_PI * 1e9 * _number(top["drive_freq_over_2pi_ghz"], "feasibility"),
        omega_q=TWO_PI * 1e6 * _number(top["qubit_freq_over_2pi_mhz"], "feasibility"),
        amplitude=1e-6 * _number(top["amplitude_um"], "feasibility"),
        g0=TWO_PI * _number(top["coupling_over_2pi_hz"], "feasibility"),
        lifetime=_number(top["lifetime_s"], "feasibility"),
        omega_p=omega_p,
    )
