"""Exception types shared by every layer of the toolkit."""


class KspecError(Exception):
    """Base class for all errors raised by :mod:`kspec`."""


class PreconditionError(KspecError, ValueError):
    """An input violates a documented hypothesis.

    ``condition`` is a short machine-readable name for the violated
    invariant (for example ``"gram not invertible"``); the CLI echoes it
    verbatim.
    """

    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or condition)


class NumericalFailure(KspecError, ArithmeticError):
    """A LAPACK routine failed or a computed result is numerically unusable."""


class ResolventPoint(PreconditionError):
    """The requested point is not an (approximate) eigenvalue."""

    def __init__(self, point, distance):
        self.point = point
        self.distance = distance
        super().__init__(
            "not an approximate eigenvalue",
            f"{point!r} lies at distance {distance:.3e} from the spectrum",
        )
