"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class UnsupportedInput(ValueError):
    """Input is well-formed but not covered by the model catalog."""


class PreconditionError(ValueError):
    """A structural precondition (e.g. exactness) is violated."""


class DegenerateInput(ValueError):
    """Input is singular within the numerical cutoff."""


class NumericalFailure(RuntimeError):
    """A series or quadrature failed to converge.

    ``partial`` carries the best estimate available at the time of failure.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CalibrationFailure(RuntimeError):
    """No candidate normalization reproduced both anchors."""

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates or []
