"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An object violates one of its structural invariants."""


class PreconditionError(ValueError):
    """Inputs fail a documented precondition (e.g. a position predicate)."""


class InvalidCouplingError(ValueError):
    """A coupling matrix violates its marginal constraints."""


class UnsupportedDimensionError(ValueError):
    """The operation is not defined in this dimension."""


class UnrecoverableFrequencyError(ValueError):
    """Fourier recovery hit a vanishing cost coefficient."""

    def __init__(self, frequencies, message=None):
        self.frequencies = list(frequencies)
        super().__init__(
            message or f"cost coefficient vanishes at frequencies {self.frequencies}"
        )


class ResourceLimitError(RuntimeError):
    """The instance exceeds what the routine is willing to handle."""
