"""Harmonic analysis of the modulated coupling sin(u_bar + u sin(wt)).

Provides a self-contained Bessel J_n evaluator, the Fourier-Bessel harmonic
table of the modulation, extraction of the resonant excitation-conserving
(JC) and pair-creating (anti-JC) terms, the Rabi-rate prediction for the
vacuum <-> single-excitation oscillation, and the analytic resonance check
for inertial worldlines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams

BESSEL_MAX_ARG = 50.0
_SERIES_SPLIT = 10.0


def bessel_j(n: int, u: float) -> float:
    """Bessel function of the first kind J_n(u) for integer n >= 0, |u| <= 50.

    Ascending power series below |u| = 10, backward (Miller) recurrence with
    the even-order sum normalization above.  Absolute error < 1e-12 on the
    supported range.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if abs(u) > BESSEL_MAX_ARG:
        raise ValueError(f"|u| must be <= {BESSEL_MAX_ARG}, got {u}")
    if u < 0:
        return (-1.0) ** n * bessel_j(n, -u)
    if u == 0.0:
        return 1.0 if n == 0 else 0.0
    if u <= _SERIES_SPLIT:
        return _bessel_series(n, u)
    return _bessel_miller(n, u)


def _bessel_series(n: int, u: float) -> float:
    half = 0.5 * u
    # term_0 = (u/2)^n / n!
    term = 1.0
    for k in range(1, n + 1):
        term *= half / k
    total = term
    m = 0
    while True:
        m += 1
        term *= -(half * half) / (m * (m + n))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)) and m > half:
            return total


def _bessel_miller(n: int, u: float) -> float:
    # start well above both the order and the turning point |u|
    start = max(n, int(u)) + 40
    start += start % 2  # even start keeps the normalization sum aligned
    jp, j = 0.0, 1e-30
    result = 0.0
    norm = 0.0
    for k in range(start, -1, -1):
        jm = (2.0 * (k + 1) / u) * j - jp
        jp, j = j, jm
        if abs(j) > 1e250:  # rescale to avoid overflow on long recurrences
            j *= 1e-250
            jp *= 1e-250
            result *= 1e-250
            norm *= 1e-250
        if k == n:
            result = j
        if k % 2 == 0:
            norm += j if k == 0 else 2.0 * j
    return result / norm


@dataclass(frozen=True)
class EffectiveTerm:
    """One resonant coupling term with a Bessel-weighted amplitude.

    kind 'jc' couples |g,n+1> <-> |e,n| (excitation-conserving); 'anti_jc'
    couples |g,n> <-> |e,n+1> (pair-creating).  The amplitude is in units of
    the bare coupling g0, and source_harmonic records which modulation
    harmonic produced the term.
    """

    kind: str
    amplitude: complex
    source_harmonic: int

    def __post_init__(self):
        if self.kind not in ("jc", "anti_jc"):
            raise ValueError(f"kind must be 'jc' or 'anti_jc', got {self.kind!r}")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")


@dataclass(frozen=True)
class ResonanceContext:
    """Drive/mode/detector frequencies plus the dimensionless trajectory parameters."""

    omega: float
    omega_p: float
    omega_q: float
    u_bar: float
    u: float

    def __post_init__(self):
        if min(self.omega, self.omega_p, self.omega_q) <= 0:
            raise ValueError("all frequencies must be positive")


@dataclass(frozen=True)
class EffectiveModel:
    terms: tuple[EffectiveTerm, ...]
    resonance: str | None  # 'sum', 'mode', or None when off-resonant

    @property
    def off_resonant(self) -> bool:
        return self.resonance is None

    def amplitude(self, kind: str) -> complex:
        for term in self.terms:
            if term.kind == kind:
                return term.amplitude
        return 0.0 + 0.0j


def jacobi_anger_coeffs(u_bar: float, u: float, n_max: int) -> dict[int, tuple[float, float]]:
    """Harmonic table {n: (cos coefficient, sin coefficient)} of sin(u_bar + u sin(wt)).

    sin(u_bar + u sin wt) = sin(u_bar)[J0(u) + 2 sum J_2n(u) cos(2n wt)]
                          + 2 cos(u_bar) sum J_2n-1(u) sin((2n-1) wt),
    truncated at harmonic n_max.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    sin_ub = math.sin(u_bar)
    cos_ub = math.cos(u_bar)
    table = {0: (sin_ub * bessel_j(0, u), 0.0)}
    for n in range(1, n_max + 1):
        jn = bessel_j(n, u)
        if n % 2 == 0:
            table[n] = (2.0 * sin_ub * jn, 0.0)
        else:
            table[n] = (0.0, 2.0 * cos_ub * jn)
    return table


def effective_hamiltonian(ctx: ResonanceContext, rel_tol: float = 1e-9) -> EffectiveModel:
    """Resonant JC/anti-JC terms kept after the rotating-wave reduction.

    Only the degenerate case omega_p = omega_q is reduced analytically, at the
    two analyzed resonances: the sum resonance omega = omega_p + omega_q and
    the carrier resonance omega = omega_p.  Any other drive frequency returns
    an off-resonant (empty) model and defers to full numerics.
    """
    if not math.isclose(ctx.omega_p, ctx.omega_q, rel_tol=rel_tol):
        raise ValueError(
            "effective_hamiltonian supports only the degenerate case omega_p = omega_q"
        )
    sin_ub = math.sin(ctx.u_bar)
    cos_ub = math.cos(ctx.u_bar)
    if math.isclose(ctx.omega, ctx.omega_p + ctx.omega_q, rel_tol=rel_tol):
        # DC harmonic feeds the JC term; the first harmonic supplies e^{-iwt}
        # against the e^{+i(wp+wq)t} pair-creating rotation
        terms = (
            EffectiveTerm("jc", complex(sin_ub * bessel_j(0, ctx.u)), 0),
            EffectiveTerm("anti_jc", 1j * cos_ub * bessel_j(1, ctx.u), 1),
        )
        return EffectiveModel(terms, "sum")
    if math.isclose(ctx.omega, ctx.omega_p, rel_tol=rel_tol):
        terms = (
            EffectiveTerm("jc", complex(sin_ub * bessel_j(0, ctx.u)), 0),
            EffectiveTerm("anti_jc", complex(sin_ub * bessel_j(2, ctx.u)), 2),
        )
        return EffectiveModel(terms, "mode")
    return EffectiveModel((), None)


def rabi_rate_prediction(params: ModelParams, u_bar: float, u: float) -> float:
    """Matrix element g_eff = g0 |cos(u_bar) J1(u)| of the vacuum-exciting term."""
    return params.g0 * abs(math.cos(u_bar) * bessel_j(1, u))


def rabi_period_prediction(params: ModelParams, u_bar: float, u: float) -> float:
    """Full population-return period T = pi / g_eff of the |g,0> <-> |e,1> oscillation.

    The angular Rabi frequency is 2 g_eff, so the excited population evolves
    as sin^2(g_eff t) and returns after pi / g_eff.
    """
    g_eff = rabi_rate_prediction(params, u_bar, u)
    if g_eff <= 0.0 or g_eff < 1e-30 * params.g0:
        raise ValueError("vanishing pair-creating amplitude: the period is undefined")
    return math.pi / g_eff


def displacement_condition(tol: float = 1e-10) -> float:
    """Smallest u* > 0 with J0(u*) = J2(u*), located by bisection.

    Since J0 - J2 = 2 J1', u* is the first maximum of J1. At this point the
    JC and anti-JC weights match and the carrier-resonance dynamics reduces
    to a detector-conditioned displacement of the mode.
    """
    f = lambda x: bessel_j(0, x) - bessel_j(2, x)
    lo, hi = 0.5, 3.0
    if not f(lo) > 0 > f(hi):
        raise RuntimeError("bisection bracket lost")  # pragma: no cover
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def relativistic_resonance_residual(v, omega_q: float, k: float, c: float):
    """omega_q + gamma(v) (ck - kv) for a co-propagating inertial detector.

    Strictly positive for every v in [0, c): the joint-excitation resonance
    condition has no subluminal solution.  Accepts scalars or arrays.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or np.any(v >= c):
        raise ValueError("v must satisfy 0 <= v < c")
    gamma = 1.0 / np.sqrt(1.0 - (v / c) ** 2)
    residual = omega_q + gamma * (c * k - k * v)
    return float(residual) if residual.ndim == 0 else residual
