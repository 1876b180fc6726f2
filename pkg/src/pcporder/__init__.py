"""Axis-pair scoring and axis ordering for parallel-coordinate plots.

The package slides value-based windows along each axis, measures a dozen
line-pattern properties inside every window, normalizes them into [0, 1]
scores, aggregates them into an axis-pair matrix, and derives axis orderings
either fully automatically or through an interactive selection session.
"""

from __future__ import annotations

from .data import Column, Dataset, LoadResult, dataset_from_text, load_csv
from .detectors import (
    BIVARIATE_PROPERTIES,
    MARGINAL_PROPERTIES,
    MIN_WINDOW_POINTS,
    PropertyId,
    RawWindowValue,
)
from .errors import (
    AxisAlreadyUsedError,
    BrokenChainError,
    DuplicateColumnNameError,
    EmptyDatasetError,
    EmptyMatrixError,
    InvalidAxisPairError,
    LengthMismatchError,
    NoActivePropertiesError,
    NonNumericColumnError,
    NothingToUndoError,
    PcpError,
    UnknownAxisError,
    UnknownColumnError,
    UnknownDatasetError,
    UnknownSessionError,
    ZeroBandwidthError,
)
from .ordering import (
    MAX_EXACT_DIMS,
    EdgeScore,
    OrderingResult,
    greedy_completion,
    order_greedy,
    order_tsp,
)
from .scoring import (
    DEFAULT_PERMUTATIONS,
    MIN_PERMUTATIONS,
    ScoreMatrix,
    ScoringEngine,
    Weights,
    WindowProfile,
    build_matrix,
    build_profile,
    default_engine,
    parse_weights,
    result_document,
)
from .service import create_app
from .session import (
    Session,
    choose_pair,
    finalize,
    set_weights,
    start_session,
    undo,
)
from .windows import Window, WindowSpec, make_windows, window_bounds, window_count

__version__ = "0.1.0"

__all__ = [
    "AxisAlreadyUsedError",
    "BIVARIATE_PROPERTIES",
    "BrokenChainError",
    "Column",
    "Dataset",
    "DEFAULT_PERMUTATIONS",
    "DuplicateColumnNameError",
    "EdgeScore",
    "EmptyDatasetError",
    "EmptyMatrixError",
    "InvalidAxisPairError",
    "LengthMismatchError",
    "LoadResult",
    "MARGINAL_PROPERTIES",
    "MAX_EXACT_DIMS",
    "MIN_PERMUTATIONS",
    "MIN_WINDOW_POINTS",
    "NoActivePropertiesError",
    "NonNumericColumnError",
    "NothingToUndoError",
    "OrderingResult",
    "PcpError",
    "PropertyId",
    "RawWindowValue",
    "ScoreMatrix",
    "ScoringEngine",
    "Session",
    "UnknownAxisError",
    "UnknownColumnError",
    "UnknownDatasetError",
    "UnknownSessionError",
    "Weights",
    "Window",
    "WindowProfile",
    "WindowSpec",
    "ZeroBandwidthError",
    "build_matrix",
    "build_profile",
    "choose_pair",
    "create_app",
    "dataset_from_text",
    "default_engine",
    "finalize",
    "greedy_completion",
    "load_csv",
    "make_windows",
    "order_greedy",
    "order_tsp",
    "parse_weights",
    "result_document",
    "set_weights",
    "start_session",
    "undo",
    "window_bounds",
    "window_count",
]
