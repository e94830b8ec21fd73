"""Exception types shared across the package."""


class IntegrationError(RuntimeError):
    """Raised when a propagator violates its norm/trace conservation budget."""


class NumericalInconsistency(RuntimeError):
    """Raised when a quantity that must be real carries a large imaginary residue."""


class IllConditionedFit(RuntimeError):
    """Raised when a sideband fit design matrix cannot separate its parameters.

    Carries the offending condition number in ``condition_number``.
    """

    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


class TruncationWarning(UserWarning):
    """Emitted when Fock-space leakage exceeds the truncation guard."""
