"""Exception hierarchy shared by every analysis module."""


class HulaHoopError(Exception):
    """Base class for analysis failures that are not plain input mistakes."""


class InvalidParameter(HulaHoopError, ValueError):
    """A parameter violates its domain; ``field`` names the offender."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NoRotatingSolution(HulaHoopError):
    """The requested rotating regime does not exist for these parameters."""


class NotASolution(HulaHoopError):
    pass


class DegenerateDenominator(HulaHoopError):
    pass


class DeterminantDrift(HulaHoopError):
    """Monodromy determinant disagrees with the Liouville value."""


class BracketFailure(HulaHoopError):
    pass


class NonFinite(HulaHoopError):
    def __init__(self, message, last_good_tau):
        super().__init__(message)
        self.last_good_tau = last_good_tau


class TooShort(HulaHoopError):
    pass


class BranchMismatch(HulaHoopError):
    pass
