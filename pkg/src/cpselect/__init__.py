"""Exact order-statistic selection by convex minimization over parallel reductions."""
from .baselines import quickselect, sort_select
from .datagen import Dist, DistributionSpec, generate, generate_array, inject_extremes
from .errors import (
    CpSelectError,
    InvalidArgumentError,
    InvalidSpecError,
    NoFitError,
    ObjectiveOverflowError,
    PrecisionLossWarning,
)
from .hybrid import HybridConfig, hybrid_select, kth_smallest, median, select
from .objective import (
    Objective,
    ObjectiveEval,
    OsWeights,
    TransformSpec,
    eval_bracket_init,
    eval_median_objective,
    eval_os_objective,
)
from .reduce import Reducer
from .solvers import SolverConfig, SolverState, solve
from .types import (
    Convention,
    Method,
    Sample,
    SelectionResult,
    SelectionSpec,
    SubgradientInterval,
    resolve_rank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
