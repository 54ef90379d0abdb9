"""Exception hierarchy.

Every error raised by the library derives from :class:`FreeInterpError` so the
CLI can map precondition failures to exit code 2 in one place.
"""


class FreeInterpError(Exception):
    pass


class InvalidPoint(FreeInterpError, ValueError):
    pass


class DuplicatePoint(FreeInterpError, ValueError):
    pass


class NonFinite(FreeInterpError, ArithmeticError):
    pass


class CapacityExceeded(FreeInterpError, ValueError):
    pass


class Underflow(FreeInterpError, ArithmeticError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class HypothesisViolated(FreeInterpError, ValueError):
    pass


class DegenerateWeight(FreeInterpError, ValueError):
    pass


class GridTooCoarse(FreeInterpError, ValueError):
    pass


class NotRadial(FreeInterpError, ValueError):
    pass


class ModeMismatch(FreeInterpError, ValueError):
    pass


class ArcsOverlap(FreeInterpError, ValueError):
    pass


class NumericAccuracyWarning(UserWarning):
    """Closed-form and quadrature evaluations disagree beyond tolerance."""
