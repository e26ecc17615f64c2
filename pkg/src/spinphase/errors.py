"""Exception types shared across the package."""


class InputError(ValueError):
    """Caller supplied a value outside an operation's domain."""


class DegeneracyError(InputError):
    """A geometric construction degenerates (zero determinant, |s| = 1, ...)."""


class NonIsolatedZeroError(InputError):
    """A loop rests at the center of the ball over a whole interval."""


class NotLiftableError(Exception):
    """Raised for loops that are not differentiable at a visit to the center.

    The liftability report is kept on ``report`` so callers can show the
    offending times.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
