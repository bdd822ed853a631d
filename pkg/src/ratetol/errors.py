"""Exception types shared across the toolkit."""


class RateTolError(Exception):
    """Base class for all toolkit-specific errors."""


class SupportMismatchError(RateTolError):
    """A distribution assigns mass outside the reference support."""


class ZeroLogicalProbabilityError(RateTolError):
    """A membership column has zero logical probability under the prior."""


class InvalidPriorError(RateTolError):
    """A single-event prior of zero cannot be updated."""


class AllZeroRowError(RateTolError):
    """A likelihood row carries no mass, so it cannot be max-normalized."""


class NoFeasibleOutputError(RateTolError):
    """Some source symbol has no admissible output under the given marginal."""


class NonConvergenceError(RateTolError):
    """An iterative solver hit its iteration cap before meeting tolerance."""


class EmptyBallError(RateTolError):
    """A threshold cover leaves some source symbol with no representative."""


class UnequalBallError(RateTolError):
    """Ball sizes differ, so the structure function is undefined."""


class ProblemFileError(RateTolError):
    """A problem file failed validation; the message names the field."""
