"""Finite-dimensional linear algebra for the control x detector x mode system.

Operators are plain dense complex ndarrays.  The composite ordering is fixed
as control (x) detector (x) mode, the detector basis is ordered (|g>, |e>)
with sigma_z = diag(-1, +1), and sigma_plus|g> = |e>.  All energies are
angular frequencies (hbar = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalInconsistency

HERMITIAN_TOL = 1e-12
IMAG_TOL = 1e-9

PAULI_NAMES = ("x", "y", "z", "plus", "minus")
SUBSYSTEMS = ("control", "detector", "mode")


@dataclass(frozen=True)
class SystemLayout:
    """Dimensions of the truncated composite Hilbert space.

    control_levels is 1 for a single trajectory and 2 when an auxiliary
    control qubit tags two superposed trajectories.  fock_dim is the mode
    truncation N_max + 1.
    """

    control_levels: int = 1
    fock_dim: int = 10

    # the detector is always a two-level system
    detector_levels: int = 2

    def __post_init__(self):
        if self.control_levels not in (1, 2):
            raise ValueError(f"control_levels must be 1 or 2, got {self.control_levels}")
        if self.detector_levels != 2:
            raise ValueError("detector_levels is fixed to 2")
        if self.fock_dim < 2:
            raise ValueError(f"fock_dim must be >= 2, got {self.fock_dim}")

    @property
    def dim(self) -> int:
        return self.control_levels * self.detector_levels * self.fock_dim

    def subsystem_dim(self, subsystem: str) -> int:
        if subsystem == "control":
            return self.control_levels
        if subsystem == "detector":
            return self.detector_levels
        if subsystem == "mode":
            return self.fock_dim
        raise ValueError(f"unknown subsystem {subsystem!r}, expected one of {SUBSYSTEMS}")


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(op - op.conj().T)) < tol)


def annihilation(fock_dim: int) -> np.ndarray:
    """Mode annihilation operator a with a[n-1, n] = sqrt(n)."""
    if fock_dim < 2:
        raise ValueError(f"fock_dim must be >= 2, got {fock_dim}")
    a = np.zeros((fock_dim, fock_dim), dtype=complex)
    ns = np.arange(1, fock_dim)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def creation(fock_dim: int) -> np.ndarray:
    return annihilation(fock_dim).conj().T


def number(fock_dim: int) -> np.ndarray:
    if fock_dim < 2:
        raise ValueError(f"fock_dim must be >= 2, got {fock_dim}")
    return np.diag(np.arange(fock_dim, dtype=float)).astype(complex)


def pauli(which: str) -> np.ndarray:
    """Pauli / ladder matrices in the ordered basis (|g>, |e>).

    Sign convention: sigma_z = diag(-1, +1), i.e. sigma_z|e> = +|e>, and
    sigma_plus|g> = |e>.
    """
    which = which.lower()
    if which == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if which == "y":
        return np.array([[0, 1j], [-1j, 0]], dtype=complex)
    if which == "z":
        return np.array([[-1, 0], [0, 1]], dtype=complex)
    if which in ("plus", "+"):
        return np.array([[0, 0], [1, 0]], dtype=complex)
    if which in ("minus", "-"):
        return np.array([[0, 1], [0, 0]], dtype=complex)
    raise ValueError(f"unknown Pauli label {which!r}, expected one of {PAULI_NAMES}")


def embed(layout: SystemLayout, subsystem: str, op: np.ndarray) -> np.ndarray:
    """Lift a subsystem operator to the composite space by Kronecker products.

    Identities are inserted on the other factors, in the fixed ordering
    control (x) detector (x) mode.
    """
    op = np.asarray(op, dtype=complex)
    want = layout.subsystem_dim(subsystem)
    if op.shape != (want, want):
        raise ValueError(
            f"operator shape {op.shape} does not match {subsystem} dimension {want}"
        )
    factors = {
        "control": np.eye(layout.control_levels, dtype=complex),
        "detector": np.eye(layout.detector_levels, dtype=complex),
        "mode": np.eye(layout.fock_dim, dtype=complex),
    }
    factors[subsystem] = op
    return np.kron(np.kron(factors["control"], factors["detector"]), factors["mode"])


_CONTROL_KETS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "plus": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "minus": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}


def control_ket(which: str) -> np.ndarray:
    key = {"+": "plus", "-": "minus"}.get(which, which)
    if key not in _CONTROL_KETS:
        raise ValueError(f"unknown control state {which!r}")
    return _CONTROL_KETS[key].copy()


def projector_control(which: str, layout: SystemLayout) -> np.ndarray:
    """|i_c><i_c| (x) I (x) I for i in {0, 1, plus, minus}."""
    if layout.control_levels != 2:
        raise ValueError("control projectors require a two-control-level layout")
    ket = control_ket(which)
    return embed(layout, "control", np.outer(ket, ket.conj()))


class QuantumState:
    """A pure vector or density matrix, validated at construction.

    A composite-system state carries the SystemLayout it lives on; subsystem
    states (e.g. a mode-only thermal state) may pass layout=None.  The
    validation tolerance defaults to 1e-9; integrators pass a looser value
    when wrapping evolved states that carry measured (unrepaired) drift.
    """

    def __init__(
        self,
        data: np.ndarray,
        layout: SystemLayout | None = None,
        tol: float = 1e-9,
    ):
        data = np.asarray(data, dtype=complex)
        if data.ndim == 1:
            norm = np.linalg.norm(data)
            if abs(norm - 1.0) > tol:
                raise ValueError(f"pure state norm {norm} deviates from 1 beyond {tol}")
        elif data.ndim == 2:
            if data.shape[0] != data.shape[1]:
                raise ValueError(f"density matrix must be square, got {data.shape}")
            if np.max(np.abs(data - data.conj().T)) > tol:
                raise ValueError(f"density matrix is not Hermitian within {tol}")
            trace = np.trace(data).real
            if abs(trace - 1.0) > tol:
                raise ValueError(f"density matrix trace {trace} deviates from 1 beyond {tol}")
            eigs = np.linalg.eigvalsh(data)
            if eigs.min() < -tol:
                raise ValueError(f"density matrix has negative eigenvalue {eigs.min()}")
        else:
            raise ValueError("state data must be a vector or a square matrix")
        if layout is not None and data.shape[0] != layout.dim:
            raise ValueError(
                f"state dimension {data.shape[0]} does not match layout dimension {layout.dim}"
            )
        self.data = data
        self.layout = layout

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def density(self) -> np.ndarray:
        """The state as a density matrix (|psi><psi| for pure states)."""
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data


def expectation(state: QuantumState | np.ndarray, op: np.ndarray) -> float:
    """<psi|O|psi> or Tr(rho O) for a Hermitian O.

    An imaginary residue below 1e-9 is discarded; anything larger raises.
    """
    op = np.asarray(op, dtype=complex)
    if not is_hermitian(op):
        raise ValueError("expectation requires a Hermitian operator")
    data = state.data if isinstance(state, QuantumState) else np.asarray(state, dtype=complex)
    if data.shape[0] != op.shape[0]:
        raise ValueError(
            f"state dimension {data.shape[0]} does not match operator dimension {op.shape[0]}"
        )
    if data.ndim == 1:
        value = np.vdot(data, op @ data)
    else:
        value = np.trace(op @ data)
    if abs(value.imag) > IMAG_TOL:
        raise NumericalInconsistency(
            f"expectation value has imaginary residue {value.imag} above {IMAG_TOL}"
        )
    return float(value.real)


def thermal_state(nbar: float, fock_dim: int) -> QuantumState:
    """Thermal mode state p_n ~ (nbar/(1+nbar))^n, renormalized on the truncated ladder."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if fock_dim < 2:
        raise ValueError(f"fock_dim must be >= 2, got {fock_dim}")
    if nbar == 0:
        probs = np.zeros(fock_dim)
        probs[0] = 1.0
    else:
        ratio = nbar / (1.0 + nbar)
        probs = ratio ** np.arange(fock_dim)
        probs = probs / probs.sum()
    return QuantumState(np.diag(probs).astype(complex))


def basis_ket(layout: SystemLayout, control: int, detector: str, n: int) -> np.ndarray:
    """Product basis ket |control>|g/e>|n> as a flat vector."""
    if not 0 <= control < layout.control_levels:
        raise ValueError(f"control index {control} out of range")
    if detector not in ("g", "e"):
        raise ValueError("detector level must be 'g' or 'e'")
    if not 0 <= n < layout.fock_dim:
        raise ValueError(f"Fock index {n} out of range")
    ket = np.zeros(layout.dim, dtype=complex)
    ket[(control * 2 + (0 if detector == "g" else 1)) * layout.fock_dim + n] = 1.0
    return ket


def product_density(
    layout: SystemLayout,
    control: np.ndarray,
    detector: np.ndarray,
    mode: np.ndarray,
) -> QuantumState:
    """Density matrix for a product state rho_c (x) rho_d (x) rho_m."""
    rho = np.kron(np.kron(control, detector), mode)
    return QuantumState(rho, layout)


def leakage_population(state_data: np.ndarray, layout: SystemLayout) -> float:
    """Total population of the top two Fock levels (truncation guard)."""
    reshaped_dim = layout.control_levels * layout.detector_levels
    if state_data.ndim == 1:
        blocks = state_data.reshape(reshaped_dim, layout.fock_dim)
        return float(np.sum(np.abs(blocks[:, -2:]) ** 2))
    diag = np.real(np.diag(state_data)).reshape(reshaped_dim, layout.fock_dim)
    return float(np.sum(diag[:, -2:]))
