"""Detector worldlines and the coupling modulation sin(k x(t)).

The cavity enters only through its wave number k = 2*2pi/L (two half-waves
of the resonant standing mode fit the cavity), so lengths may be expressed
in any unit as long as L, x_bar, A and v share it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

KINDS = ("static", "inertial", "oscillatory")


@dataclass(frozen=True)
class TrajectorySpec:
    """A static, inertial, or sinusoidally oscillating detector worldline.

    x_bar is the initial position (static/oscillatory), A the oscillation
    amplitude, omega the oscillation angular frequency (rad/s), and v the
    velocity of an inertial worldline in length units per second.  The
    dimensionless products u_bar = k*x_bar and u = k*A are exposed read-only.
    """

    kind: str
    cavity_length: float = 1.0
    x_bar: float = 0.0
    amplitude: float = 0.0
    omega: float = 0.0
    velocity: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.cavity_length <= 0:
            raise ValueError("cavity_length must be positive")
        if not 0.0 <= self.x_bar <= self.cavity_length:
            raise ValueError(
                f"x_bar={self.x_bar} outside the cavity [0, {self.cavity_length}]"
            )
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.kind == "oscillatory" and self.omega <= 0:
            raise ValueError("oscillatory trajectories need omega > 0")
        if self.kind == "inertial" and self.velocity < 0:
            raise ValueError("inertial trajectories need velocity >= 0")

    @property
    def wave_number(self) -> float:
        return 2.0 * 2.0 * math.pi / self.cavity_length

    @property
    def u_bar(self) -> float:
        return self.wave_number * self.x_bar

    @property
    def u(self) -> float:
        return self.wave_number * self.amplitude

    @classmethod
    def static(cls, u_bar: float = 2.0 * math.pi, cavity_length: float = 1.0) -> "TrajectorySpec":
        k = 2.0 * 2.0 * math.pi / cavity_length
        return cls(kind="static", cavity_length=cavity_length, x_bar=u_bar / k)

    @classmethod
    def oscillatory(
        cls,
        u: float,
        omega: float,
        u_bar: float = 2.0 * math.pi,
        cavity_length: float = 1.0,
    ) -> "TrajectorySpec":
        """Build from the dimensionless position u_bar and amplitude u = k*A.

        u_bar defaults to 2*pi, a trajectory starting from the cavity center.
        """
        k = 2.0 * 2.0 * math.pi / cavity_length
        return cls(
            kind="oscillatory",
            cavity_length=cavity_length,
            x_bar=u_bar / k,
            amplitude=u / k,
            omega=omega,
        )

    @classmethod
    def inertial(cls, kv: float, cavity_length: float = 1.0) -> "TrajectorySpec":
        """Build from the product k*v (rad/s), the frequency the coupling sweeps at."""
        k = 2.0 * 2.0 * math.pi / cavity_length
        return cls(kind="inertial", cavity_length=cavity_length, velocity=kv / k)


def position(spec: TrajectorySpec, t: float) -> float:
    if spec.kind == "static":
        return spec.x_bar
    if spec.kind == "inertial":
        return spec.velocity * t
    return spec.x_bar + spec.amplitude * math.sin(spec.omega * t)


def modulation(spec: TrajectorySpec, t: float) -> float:
    """The dimensionless coupling profile sin(k x(t)) in [-1, 1]."""
    return math.sin(spec.wave_number * position(spec, t))


def acceleration(spec: TrajectorySpec, t: float) -> float:
    if spec.kind == "oscillatory":
        return -spec.amplitude * spec.omega**2 * math.sin(spec.omega * t)
    return 0.0
