"""Twirling of a hula-hoop on an elliptically moving waist."""

from .errors import (
    BracketFailure,
    BranchMismatch,
    DegenerateDenominator,
    DeterminantDrift,
    HulaHoopError,
    InvalidParameter,
    NoRotatingSolution,
    NonFinite,
    NotASolution,
    TooShort,
)
from .model import DimensionalParams, Forces, Params, State, nondimensionalize

__version__ = "0.1.0"
