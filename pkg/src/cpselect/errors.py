"""Exception and warning types raised by cpselect."""


class CpSelectError(Exception):
    """Base class for library errors."""


class InvalidSpecError(CpSelectError, ValueError):
    """A rank or selection request that cannot be satisfied for the sample."""


class InvalidArgumentError(CpSelectError, ValueError):
    pass


class ObjectiveOverflowError(CpSelectError, OverflowError):
    """The objective sum overflowed; rerun with the log transform enabled."""


class NoFitError(CpSelectError, RuntimeError):
    """Every elemental subset was singular or ill-conditioned."""


class PrecisionLossWarning(RuntimeWarning):
    """Data range is wide enough that objective sums lose most of their digits."""
