"""Sublinear summaries of graph streams built from node-hashed sketches.

Each stream element ``(x, y; t)`` with weight ``w`` adds ``w`` to cell
``[h(x)][h(y)]`` of every sketch; queries run on each sketch and merge the
answers (minimum for weights, conjunction for reachability).
"""

from glava.errors import GLavaError
from glava.evaluation import (
    BoundParams,
    CountMinSketch,
    ErrorReport,
    StreamModel,
    compare_shapes,
    gen_stream,
    iter_stream,
    measure_error,
    size_for_bounds,
    validate_bounds,
)
from glava.hashing import HashSpec, hash_eval, make_family, pairwise_deviation
from glava.oracle import ExactGraph
from glava.pattern import Endpoint, SubgraphQuery, parse_pattern
from glava.query import (
    Alarm,
    Estimate,
    PointMonitor,
    estimate_degree,
    estimate_edge,
    estimate_flow,
    estimate_reach,
    estimate_subgraph,
    estimate_subgraph_fast,
    monitor_observe,
)
from glava.sketch import GLavaSummary, GraphSketch, MatrixShape, resolve_schedule, summary_new
from glava.stream import StreamElement, parse_element, read_stream

__version__ = "0.1.0"

__all__ = [
    "Alarm", "BoundParams", "CountMinSketch", "Endpoint", "ErrorReport", "Estimate",
    "ExactGraph", "GLavaError", "GLavaSummary", "GraphSketch", "HashSpec", "MatrixShape",
    "PointMonitor", "StreamElement", "StreamModel", "SubgraphQuery", "compare_shapes",
    "estimate_degree", "estimate_edge", "estimate_flow", "estimate_reach", "estimate_subgraph",
    "estimate_subgraph_fast", "gen_stream", "hash_eval", "iter_stream", "make_family",
    "measure_error", "monitor_observe", "pairwise_deviation", "parse_element", "parse_pattern",
    "read_stream", "resolve_schedule", "size_for_bounds", "summary_new", "validate_bounds",
]
