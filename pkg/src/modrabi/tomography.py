"""Sideband tomography: synthesize red/blue scans and fit them back to populations.

A blue-sideband pulse couples |g,n> <-> |e,n+1> and a red-sideband pulse
couples |g,n> <-> |e,n-1| (|g,0> is dark on red), each pair Rabi-flopping at

    Omega_{n,n+1} = eta Omega0 exp(-eta^2/2) L^1_n(eta^2) / sqrt(n+1).

The ground-level signal of a scan is a sum of pair terms

    p_g(t) = sum_n [ P_{n+} + P_{n-} cos(Omega t) + S_n sin(Omega t) ] / 2,

linear in the initial populations and pair coherences, so a combined fit of
both scans recovers every P_{g,n} and P_{e,n} under nonnegativity and
unit-normalization constraints.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import nnls

from . import hilbert
from .errors import IllConditionedFit
from .hilbert import QuantumState

BRANCHES = ("red", "blue")
CONDITION_LIMIT = 1e8
_ACTIVE_TOL = 1e-12

# pulse lengths 0..250 us; 21 points keeps the combined fit well conditioned
# while a 100-shot scan reproduces error bars of the published scale
DEFAULT_SCAN_TIMES = np.arange(0.0, 250.00001e-6, 12.5e-6)


def laguerre_l1(n: int, x: float) -> float:
    """Generalized Laguerre polynomial L_n^1(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    prev, cur = 1.0, 2.0 - x  # L_0^1, L_1^1
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2.0 * k + 2.0 - x) * cur - (k + 1.0) * prev) / (k + 1.0)
    return cur


def sideband_rabi_frequency(n: int, eta: float, omega0: float) -> float:
    """Pair Rabi frequency Omega_{n,n+1} (rad/s) for the |g,n> <-> |e,n+1> transition."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0.0 < eta < 0.5:
        raise ValueError(f"eta must lie in (0, 0.5), got {eta}")
    return eta * omega0 * math.exp(-(eta**2) / 2.0) * laguerre_l1(n, eta**2) / math.sqrt(n + 1.0)


@dataclass
class PhononDistribution:
    """Joint detector/phonon population table P_{g,n}, P_{e,n} for n = 0..n_max.

    s_blue[n] is the sin-quadrature coherence of the blue pair (g,n)-(e,n+1),
    s_red[m] of the red pair (g,m+1)-(e,m); coherences of pairs that reach
    past the table are fixed to zero.
    """

    p_g: np.ndarray
    p_e: np.ndarray
    s_blue: np.ndarray = field(default=None)  # type: ignore[assignment]
    s_red: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.p_g = np.asarray(self.p_g, dtype=float)
        self.p_e = np.asarray(self.p_e, dtype=float)
        if self.p_g.shape != self.p_e.shape or self.p_g.ndim != 1:
            raise ValueError("p_g and p_e must be 1-d arrays of equal length")
        pairs = len(self.p_g) - 1
        if self.s_blue is None:
            self.s_blue = np.zeros(pairs)
        if self.s_red is None:
            self.s_red = np.zeros(pairs)
        self.s_blue = np.asarray(self.s_blue, dtype=float)
        self.s_red = np.asarray(self.s_red, dtype=float)
        if self.s_blue.shape != (pairs,) or self.s_red.shape != (pairs,):
            raise ValueError(f"coherence arrays must have length n_max = {pairs}")
        for name, p in (("p_g", self.p_g), ("p_e", self.p_e)):
            if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
                raise ValueError(f"{name} entries must lie in [0, 1]")
        total = self.p_g.sum() + self.p_e.sum()
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"populations sum to {total}, expected 1 within 1e-6")

    @property
    def n_max(self) -> int:
        return len(self.p_g) - 1


def mean_phonon(dist: PhononDistribution, branch_filter: str | None = None) -> float:
    """sum_n n (P_{g,n} + P_{e,n}), optionally restricted to one detector level."""
    ns = np.arange(dist.n_max + 1)
    if branch_filter is None:
        return float(ns @ (dist.p_g + dist.p_e))
    if branch_filter == "g":
        return float(ns @ dist.p_g)
    if branch_filter == "e":
        return float(ns @ dist.p_e)
    raise ValueError("branch_filter must be None, 'g' or 'e'")


@dataclass
class SidebandScan:
    """A simulated sideband scan: ground-level signal versus pulse length."""

    branch: str
    eta: float
    omega0: float
    times: np.ndarray
    p_g: np.ndarray
    shots: int = 0  # 0 marks a noiseless scan

    def __post_init__(self):
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")
        self.times = np.asarray(self.times, dtype=float)
        self.p_g = np.asarray(self.p_g, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.p_g.shape:
            raise ValueError("times and p_g must be 1-d arrays of equal length")
        if np.any(self.times < 0) or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be nonnegative and strictly increasing")
        if np.any(self.p_g < 0) or np.any(self.p_g > 1):
            raise ValueError("p_g values must lie in [0, 1]")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")


def _pair_frequencies(n_max: int, eta: float, omega0: float) -> np.ndarray:
    return np.array([sideband_rabi_frequency(n, eta, omega0) for n in range(n_max + 1)])


def _design_matrix(
    times: np.ndarray, branch: str, n_max: int, eta: float, omega0: float
) -> np.ndarray:
    """Rows of the linear scan model over [P_g | P_e | S_blue | S_red]."""
    k = n_max
    omegas = _pair_frequencies(k, eta, omega0)
    cols = 2 * (k + 1) + 2 * k
    a = np.zeros((len(times), cols))
    cos = np.cos(np.outer(times, omegas))
    sin = np.sin(np.outer(times, omegas))
    if branch == "blue":
        for n in range(k + 1):
            a[:, n] = 0.5 * (1.0 + cos[:, n])  # P_g[n], pairs with e,n+1
        for n in range(k):
            a[:, (k + 1) + (n + 1)] = 0.5 * (1.0 - cos[:, n])  # P_e[n+1]
            a[:, 2 * (k + 1) + n] = 0.5 * sin[:, n]  # S_blue[n]
    else:
        a[:, 0] = 1.0  # |g,0> is dark on red
        for m in range(k):
            a[:, m + 1] = 0.5 * (1.0 + cos[:, m])  # P_g[m+1], pairs with e,m
            a[:, (k + 1) + m] = 0.5 * (1.0 - cos[:, m])  # P_e[m]
            a[:, 2 * (k + 1) + k + m] = 0.5 * sin[:, m]  # S_red[m]
        # |e,n_max> drives population into |g,n_max+1>, outside the table
        a[:, (k + 1) + k] = 0.5 * (1.0 - cos[:, k])
    return a


def _parameter_vector(dist: PhononDistribution) -> np.ndarray:
    return np.concatenate([dist.p_g, dist.p_e, dist.s_blue, dist.s_red])


def synthesize_scan(
    dist: PhononDistribution,
    branch: str,
    eta: float,
    omega0: float,
    times: np.ndarray,
    shots: int = 0,
    seed: int | None = None,
) -> SidebandScan:
    """Evaluate the scan model for a known distribution, optionally with shot noise.

    shots > 0 replaces each point by a binomial draw with that many shots,
    using a deterministically seeded generator.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    times = np.asarray(times, dtype=float)
    a = _design_matrix(times, branch, dist.n_max, eta, omega0)
    p = np.clip(a @ _parameter_vector(dist), 0.0, 1.0)
    if shots > 0:
        rng = np.random.default_rng(seed)
        p = rng.binomial(shots, p) / shots
    return SidebandScan(branch=branch, eta=eta, omega0=omega0, times=times, p_g=p, shots=shots)


@dataclass
class FitResult:
    """Fitted populations with local-quadratic-model uncertainties."""

    distribution: PhononDistribution
    sigma_g: np.ndarray
    sigma_e: np.ndarray
    mean_phonon: float
    mean_phonon_sigma: float
    residual_norm: float
    condition_number: float


def _point_sigmas(scan: SidebandScan) -> np.ndarray:
    if scan.shots == 0:
        return np.ones_like(scan.p_g)
    # Agresti-style smoothing keeps the variance finite at p = 0 or 1
    smooth = (scan.p_g * scan.shots + 1.0) / (scan.shots + 2.0)
    return np.sqrt(smooth * (1.0 - smooth) / scan.shots)


def fit_distribution(red: SidebandScan, blue: SidebandScan, n_max: int = 5) -> FitResult:
    """Combined constrained least-squares fit of a red and a blue scan.

    Populations are constrained nonnegative and normalized to one; pair
    coherences are free.  The solve starts from a nonnegative-least-squares
    seed, refines by projected gradient on the simplex, and polishes the
    identified active set with an exact equality-constrained solve.  Ties in
    degenerate directions are broken toward lower mean phonon number.
    """
    if red.branch != "red" or blue.branch != "blue":
        raise ValueError("expected one red and one blue scan, in that order")
    if not (math.isclose(red.eta, blue.eta) and math.isclose(red.omega0, blue.omega0)):
        raise ValueError("red and blue scans must share eta and omega0")

    k = n_max
    n_pop = 2 * (k + 1)
    n_par = n_pop + 2 * k
    a = np.vstack(
        [
            _design_matrix(red.times, "red", k, red.eta, red.omega0),
            _design_matrix(blue.times, "blue", k, blue.eta, blue.omega0),
        ]
    )
    b = np.concatenate([red.p_g, blue.p_g])
    sig = np.concatenate([_point_sigmas(red), _point_sigmas(blue)])
    aw = a / sig[:, None]
    bw = b / sig

    cond = np.linalg.cond(aw)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedFit(
            f"scan design cannot separate the fit parameters "
            f"(condition number {cond:.3e} > {CONDITION_LIMIT:.0e}); "
            "extend or refine the pulse-length grid",
            condition_number=float(cond),
        )

    # tiny linear tie-break toward lower <N> in flat directions
    n_weights = np.concatenate([np.arange(k + 1.0), np.arange(k + 1.0), np.zeros(2 * k)])
    tie = 1e-9 * float(np.max(np.abs(aw.T @ bw))) * n_weights

    x = _nnls_seed(aw, bw, n_pop, n_par)
    x = _projected_gradient(aw, bw, tie, x, n_pop)
    x, free = _active_set_polish(aw, bw, tie, x, n_pop)

    sigma_par, mean_sigma = _uncertainties(aw, bw, x, free, n_pop, n_weights, noiseless=red.shots == 0 and blue.shots == 0)

    p_g = np.clip(x[: k + 1], 0.0, None)
    p_e = np.clip(x[k + 1 : n_pop], 0.0, None)
    total = p_g.sum() + p_e.sum()
    p_g, p_e = p_g / total, p_e / total  # exact renormalization of rounding residue
    dist = PhononDistribution(
        p_g=p_g,
        p_e=p_e,
        s_blue=x[n_pop : n_pop + k],
        s_red=x[n_pop + k :],
    )
    residual = float(np.linalg.norm(a @ x - b))
    return FitResult(
        distribution=dist,
        sigma_g=sigma_par[: k + 1],
        sigma_e=sigma_par[k + 1 : n_pop],
        mean_phonon=mean_phonon(dist),
        mean_phonon_sigma=mean_sigma,
        residual_norm=residual,
        condition_number=float(cond),
    )


def _nnls_seed(aw: np.ndarray, bw: np.ndarray, n_pop: int, n_par: int) -> np.ndarray:
    """Nonnegative seed with the coherences split into signed parts."""
    n_coh = n_par - n_pop
    blocks = [aw[:, :n_pop], aw[:, n_pop:], -aw[:, n_pop:]]
    penalty = 100.0 * float(np.max(np.abs(aw)))
    sum_row = np.concatenate([np.full(n_pop, penalty), np.zeros(2 * n_coh)])
    a_aug = np.vstack([np.hstack(blocks), sum_row])
    b_aug = np.concatenate([bw, [penalty]])
    z, _ = nnls(a_aug, b_aug)
    return np.concatenate([z[:n_pop], z[n_pop : n_pop + n_coh] - z[n_pop + n_coh :]])


def _project_simplex(p: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {p >= 0, sum p = 1}."""
    u = np.sort(p)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(p) + 1)
    rho = np.max(np.where(u - css / idx > 0, idx, 0))
    theta = css[rho - 1] / rho
    return np.maximum(p - theta, 0.0)


def _projected_gradient(
    aw: np.ndarray, bw: np.ndarray, tie: np.ndarray, x0: np.ndarray, n_pop: int, iters: int = 1500
) -> np.ndarray:
    g_mat = aw.T @ aw
    g_vec = aw.T @ bw
    lip = np.linalg.norm(g_mat, 2)
    step = 1.0 / lip
    x = x0.copy()
    x[:n_pop] = _project_simplex(x[:n_pop])
    y = x.copy()
    t_acc = 1.0
    for _ in range(iters):
        grad = g_mat @ y - g_vec + 0.5 * tie
        z = y - step * grad
        z[:n_pop] = _project_simplex(z[:n_pop])
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_acc * t_acc))
        y = z + ((t_acc - 1.0) / t_next) * (z - x)
        y[:n_pop] = _project_simplex(y[:n_pop])
        x, t_acc = z, t_next
    return x


def _active_set_polish(
    aw: np.ndarray, bw: np.ndarray, tie: np.ndarray, x0: np.ndarray, n_pop: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exact equality-constrained solve on the free set identified by the PG pass."""
    n_par = aw.shape[1]
    g_mat = aw.T @ aw
    g_vec = aw.T @ bw - 0.5 * tie
    free = np.ones(n_par, dtype=bool)
    free[:n_pop] = x0[:n_pop] > 1e-8
    x = x0.copy()
    for _ in range(4 * n_par):
        x = np.zeros(n_par)
        idx = np.flatnonzero(free)
        c = np.zeros(len(idx))
        c[idx < n_pop] = 1.0  # normalization touches population columns only
        kkt = np.zeros((len(idx) + 1, len(idx) + 1))
        kkt[: len(idx), : len(idx)] = g_mat[np.ix_(idx, idx)]
        kkt[: len(idx), -1] = 0.5 * c
        kkt[-1, : len(idx)] = c
        rhs = np.concatenate([g_vec[idx], [1.0]])
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        x[idx] = sol[:-1]
        lam = sol[-1]
        pops = x[:n_pop]
        free_pops = free[:n_pop]
        if free_pops.any() and np.min(pops[free_pops]) < -_ACTIVE_TOL:
            free[np.argmin(np.where(free_pops, pops, np.inf))] = False
            continue
        # dual feasibility of the clamped populations: release a variable whose
        # reduced gradient points into the feasible region
        grad = g_mat @ x - g_vec
        clamped = np.flatnonzero(~free[:n_pop])
        if len(clamped) == 0:
            return x, free
        reduced = grad[clamped] + 0.5 * lam
        if np.min(reduced) >= -1e-10 * max(1.0, np.max(np.abs(grad))):
            return x, free
        free[clamped[np.argmin(reduced)]] = True
    return x, free  # pragma: no cover


def _uncertainties(
    aw: np.ndarray,
    bw: np.ndarray,
    x: np.ndarray,
    free: np.ndarray,
    n_pop: int,
    n_weights: np.ndarray,
    noiseless: bool,
) -> tuple[np.ndarray, float]:
    idx = np.flatnonzero(free)
    g_free = (aw.T @ aw)[np.ix_(idx, idx)]
    if noiseless:
        dof = max(1, aw.shape[0] - len(idx) + 1)
        scale = float(np.sum((aw @ x - bw) ** 2)) / dof
    else:
        scale = 1.0  # rows already whitened by the known shot variance
    cov = scale * np.linalg.pinv(g_free)
    # remove the direction forbidden by the normalization constraint
    c = np.zeros(len(idx))
    c[idx < n_pop] = 1.0
    cc = cov @ c
    denom = float(c @ cc)
    if denom > 0:
        cov = cov - np.outer(cc, cc) / denom
    sigma = np.zeros(len(x))
    sigma[idx] = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    w_free = n_weights[idx]
    var_mean = float(w_free @ cov @ w_free)
    return sigma[:n_pop], math.sqrt(max(var_mean, 0.0))


def basis_transform_pm(state: QuantumState) -> QuantumState:
    """Control-qubit rotation mapping |+c> -> |0c> and |-c> -> -|1c>.

    Measuring the branch-0 (branch-1) population afterwards equals measuring
    the plus (minus) projector on the original state.
    """
    if state.layout is None or state.layout.control_levels != 2:
        raise ValueError("basis_transform_pm requires a two-control-level state")
    u_c = np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / math.sqrt(2.0)
    u = hilbert.embed(state.layout, "control", u_c)
    if state.is_pure:
        return QuantumState(u @ state.data, state.layout, tol=1e-6)
    return QuantumState(u @ state.data @ u.conj().T, state.layout, tol=1e-6)


def shelving_projection(state: QuantumState, control: int, detector: str) -> float:
    """Population reported after shelving everything but one (branch, level) pair.

    The mode is traced out; the four kept choices sum to one.
    """
    if state.layout is None or state.layout.control_levels != 2:
        raise ValueError("shelving_projection requires a two-control-level state")
    layout = state.layout
    if control not in (0, 1):
        raise ValueError("control branch must be 0 or 1")
    if detector not in ("g", "e"):
        raise ValueError("detector level must be 'g' or 'e'")
    d = 0 if detector == "g" else 1
    lo = (control * 2 + d) * layout.fock_dim
    hi = lo + layout.fock_dim
    if state.is_pure:
        return float(np.sum(np.abs(state.data[lo:hi]) ** 2))
    return float(np.sum(np.real(np.diag(state.data)[lo:hi])))


_HEADER_RE = re.compile(
    r"^#\s*scan\s+branch=(red|blue)\s+eta=([0-9eE.+-]+)\s+omega0_over_2pi_khz=([0-9eE.+-]+)\s*$"
)


def write_scan(scan: SidebandScan, path: str | Path) -> None:
    """Write a scan as plain-text records (time_us, p_g, shots) with one header line."""
    lines = [
        f"# scan branch={scan.branch} eta={scan.eta:.6g} "
        f"omega0_over_2pi_khz={scan.omega0 / (2e3 * math.pi):.6g}",
        "# time_us p_g shots",
    ]
    for t, p in zip(scan.times, scan.p_g):
        lines.append(f"{t * 1e6:.6f} {p:.8f} {scan.shots}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_scan(path: str | Path) -> SidebandScan:
    """Parse a scan file written by write_scan (grammar documented in the README)."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty scan file")
    m = _HEADER_RE.match(text[0])
    if m is None:
        raise ValueError(
            f"{path}: first line must be "
            "'# scan branch=<red|blue> eta=<float> omega0_over_2pi_khz=<float>'"
        )
    branch, eta, omega0_khz = m.group(1), float(m.group(2)), float(m.group(3))
    times, p_g, shots = [], [], 0
    for lineno, line in enumerate(text[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'time_us p_g shots', got {line!r}")
        times.append(float(parts[0]) * 1e-6)
        p_g.append(float(parts[1]))
        shots = int(parts[2])
    if not times:
        raise ValueError(f"{path}: scan file has no data rows")
    return SidebandScan(
        branch=branch,
        eta=eta,
        omega0=2e3 * math.pi * omega0_khz,
        times=np.asarray(times),
        p_g=np.asarray(p_g),
        shots=shots,
    )
