"""Exception types shared by the package."""


class InvalidInputError(ValueError):
    """Input data is malformed, non-finite, or violates a precondition."""


class UnsupportedError(NotImplementedError):
    """The requested operation is not defined for this input."""


class NumericalAmbiguityError(ArithmeticError):
    """Sampled numerical evidence is inconsistent at the working tolerance."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class PropertyViolationError(ArithmeticError):
    """A mathematical identity that must hold was violated beyond tolerance."""


class RangeError(OverflowError):
    """A matrix function overflowed double precision."""


class AmbiguityError(ValueError):
    """A geometric construction that requires a unique answer got several."""
