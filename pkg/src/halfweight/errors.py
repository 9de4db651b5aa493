"""Exception types shared across the package."""


class HalfweightError(Exception):
    """Base class for all errors raised by this package."""


class RingMismatch(HalfweightError):
    """Operands belong to different coefficient rings."""


class NonInvertibleDenominator(HalfweightError):
    """A rational cannot be embedded because p divides its denominator."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonInvertibleElement(HalfweightError):
    """Inverse requested for a non-unit of the ring."""


class NonInvertibleLeadingCoefficient(HalfweightError):
    """Series inversion requires the constant term to be a unit."""


class UnsupportedRing(HalfweightError):
    """The operation needs a field (or another ring than the one given)."""


class InvalidWeight(HalfweightError):
    """Weight outside the domain of the requested construction."""


class PrecisionTooLow(HalfweightError):
    """Not enough coefficients to run the requested linear algebra."""


class IndependenceFailure(HalfweightError):
    """A conditionally-defined basis turned out to be linearly dependent."""


class PlusSpaceViolation(HalfweightError):
    """A form expected to satisfy the plus-space coefficient pattern does not."""


class NotStable(HalfweightError):
    """Hecke image of a space is not contained in its span at the checked precision."""


class DegenerateInput(HalfweightError):
    """Input data insufficient for a fit (fewer than two distinct abscissae)."""
