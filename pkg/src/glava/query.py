"""Approximate queries over a :class:`~glava.sketch.GLavaSummary`.

Every estimator runs on each sketch independently and merges the per-sketch
answers: minimum for weights and counts, conjunction for reachability.
For insert-only streams under sum aggregation the weight estimators never
report less than the exact value.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from glava.errors import (
    DirectionError,
    InvalidParameterError,
    MissingCompanionError,
    UnsupportedOperationError,
    UnsupportedPatternError,
)
from glava.pattern import SubgraphQuery, compile_query, match
from glava.sketch import GLavaSummary, GraphSketch
from glava.stream import Direction, StreamElement


@dataclass(frozen=True)
class Estimate:
    value: float | bool
    per_sketch: tuple = ()
    terms: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        doc = {"value": self.value, "per_sketch": list(self.per_sketch)}
        if self.terms:
            doc["terms"] = list(self.terms)
        return doc


def _require_additive(summary: GLavaSummary, what: str) -> None:
    if summary.aggregation not in ("sum", "count"):
        raise UnsupportedOperationError(
            f"{what} estimates need sum or count aggregation, not {summary.aggregation}"
        )


def _check_direction(summary: GLavaSummary, direction: Direction) -> None:
    if direction not in ("in", "out", "undirected"):
        raise DirectionError(f"unknown direction {direction!r}")
    if (direction == "undirected") == summary.directed:
        kind = "directed" if summary.directed else "undirected"
        raise DirectionError(f"direction {direction!r} does not apply to a {kind} summary")


def _flow(matrix: np.ndarray, s: GraphSketch, a: str, direction: Direction) -> float:
    if direction == "in":
        return matrix[:, s.col_of(a)].sum().item()
    if direction == "out":
        return matrix[s.row_of(a)].sum().item()
    r, c = s.row_of(a), s.col_of(a)
    return (matrix[r].sum() + matrix[:, c].sum() - matrix[r, c]).item()


def estimate_edge(summary: GLavaSummary, a: str, b: str) -> Estimate:
    _require_additive(summary, "edge")
    if not summary.directed and b < a:
        a, b = b, a
    per = tuple(s.cell(a, b) for s in summary.sketches)
    return Estimate(min(per), per)


def estimate_flow(summary: GLavaSummary, a: str, direction: Direction = "in") -> Estimate:
    _require_additive(summary, "flow")
    _check_direction(summary, direction)
    per = tuple(_flow(s.cells, s, a, direction) for s in summary.sketches)
    return Estimate(min(per), per)


def estimate_degree(summary: GLavaSummary, a: str, direction: Direction = "out") -> Estimate:
    """Distinct-neighbour count bound from the unit-weight companion counters."""
    if not summary.companions:
        raise MissingCompanionError("degree estimates need a summary built with companions=True")
    _check_direction(summary, direction)
    per = tuple(_flow(s.companions, s, a, direction) for s in summary.sketches)
    return Estimate(min(per), per)


def _sketch_reach(s: GraphSketch, a: str, b: str, directed: bool) -> bool:
    mask = s.mask()
    if not s.shape.square:
        # rows and columns index different bucket spaces, so multi-hop paths
        # cannot be followed; a path needs an edge out of a and one into b
        ra, ca, rb, cb = s.row_of(a), s.col_of(a), s.row_of(b), s.col_of(b)
        if directed:
            return bool(mask[ra, cb] or (mask[ra].any() and mask[:, cb].any()))
        touches_a = mask[ra].any() or mask[:, ca].any()
        touches_b = mask[rb].any() or mask[:, cb].any()
        return bool(touches_a and touches_b)
    if not directed:
        mask = mask | mask.T
    start, goal = s.row_of(a), s.col_of(b)
    reached = np.zeros(s.shape.m, dtype=bool)
    reached[start] = True
    frontier = np.array([start])
    while frontier.size:
        step = mask[frontier].any(axis=0) & ~reached
        if step[goal]:
            return True
        reached |= step
        frontier = np.flatnonzero(step)
    return bool(reached[goal])


def estimate_reach(summary: GLavaSummary, a: str, b: str) -> Estimate:
    """True only if every sketch has a path between the mapped buckets."""
    if a == b:
        return Estimate(True, (True,) * summary.d)
    per = []
    for s in summary.sketches:
        per.append(_sketch_reach(s, a, b, summary.directed))
        if not per[-1]:
            break
    return Estimate(all(per), tuple(per))


def _sketch_subgraph(s: GraphSketch, variables, edges, directed: bool, mode) -> float:
    cells = s.cells.tolist()
    m, p = s.shape
    domains = []
    for var in variables:
        if s.shape.square:
            domains.append([(i, i, None) for i in range(m)])
        elif directed and not var.as_target:
            domains.append([(r, None, None) for r in range(m)])
        elif directed and not var.as_source:
            domains.append([(None, c, None) for c in range(p)])
        else:
            domains.append([(r, c, None) for r, c in itertools.product(range(m), range(p))])

    def resolve(label: str):
        return (s.row_of(label), s.col_of(label), label)

    if directed:
        def weight(u, v, same):
            return cells[u[0]][v[1]]
    else:
        def weight(u, v, same):
            if u[2] is not None and v[2] is not None:
                if v[2] < u[2]:
                    u, v = v, u
                return cells[u[0]][v[1]]
            if same:
                return cells[u[0]][u[1]]
            # orientation of the stored pair is unknown: both candidate cells
            first, second = (u[0], v[1]), (v[0], u[1])
            total = cells[first[0]][first[1]]
            if second != first:
                total += cells[second[0]][second[1]]
            return total

    return match(edges, domains, resolve, weight, mode)


def estimate_subgraph(summary: GLavaSummary, query: SubgraphQuery) -> Estimate:
    """Aggregate weight (or match count) of a pattern, minimised over sketches.

    A query edge that maps to an empty cell in any sketch makes the whole
    estimate 0; evaluation stops at the first such sketch.
    """
    _require_additive(summary, "subgraph")
    variables, edges = compile_query(query)
    per = []
    for s in summary.sketches:
        per.append(_sketch_subgraph(s, variables, edges, summary.directed, query.mode))
        if per[-1] == 0:
            break
    return Estimate(min(per), tuple(per))


def estimate_subgraph_fast(summary: GLavaSummary, query: SubgraphQuery) -> Estimate:
    """Sum of per-edge minima; never above :func:`estimate_subgraph`.

    Free wildcards reduce to node flows, ``(x, *)`` being the out-flow of x.
    Bound wildcards tie edges together and are rejected.
    """
    _require_additive(summary, "subgraph")
    if query.has_bound:
        raise UnsupportedPatternError("bound wildcards cannot be split into per-edge minima")
    if query.mode != "sum_weights":
        raise UnsupportedPatternError("the per-edge form only answers sum_weights queries")
    terms = []
    for u, v in query.edges:
        if u.is_constant and v.is_constant:
            term = estimate_edge(summary, u.label, v.label).value
        elif u.is_constant:
            term = estimate_flow(summary, u.label, "out" if summary.directed else "undirected").value
        elif v.is_constant:
            term = estimate_flow(summary, v.label, "in" if summary.directed else "undirected").value
        else:
            term = min(s.cells.sum().item() for s in summary.sketches)
        terms.append(term)
    value = 0.0 if any(t == 0 for t in terms) else math.fsum(terms)
    return Estimate(value, (), tuple(terms))


# -- point monitoring -------------------------------------------------------

@dataclass(frozen=True)
class Alarm:
    node: str
    direction: str
    comparison: str
    threshold: float
    estimate: float
    projected: float
    element: StreamElement
    ordinal: int

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["element"] = asdict(self.element)
        return doc


class PointMonitor:
    """Watches one node's in/out flow against a threshold while ingesting.

    For each matching element the pre-update flow estimate plus the
    element's weight is compared with the threshold; every element is then
    applied to the summary.
    """

    def __init__(
        self,
        summary: GLavaSummary,
        node: str,
        direction: Direction = "in",
        threshold: float = math.inf,
        comparison: Literal["above", "below"] = "above",
    ) -> None:
        _require_additive(summary, "flow")
        _check_direction(summary, direction)
        if math.isnan(threshold):
            raise InvalidParameterError("threshold must be a number")
        if comparison not in ("above", "below"):
            raise InvalidParameterError(f"comparison must be 'above' or 'below', not {comparison!r}")
        self.summary = summary
        self.node = node
        self.direction = direction
        self.threshold = threshold
        self.comparison = comparison
        self.observed = 0

    def matches(self, e: StreamElement) -> bool:
        if self.direction == "in":
            return e.dst == self.node
        if self.direction == "out":
            return e.src == self.node
        return self.node in (e.src, e.dst)

    def observe(self, e: StreamElement) -> Alarm | None:
        self.observed += 1
        alarm = None
        if self.matches(e):
            current = estimate_flow(self.summary, self.node, self.direction).value
            projected = current + (1 if self.summary.aggregation == "count" else e.weight)
            fired = projected > self.threshold if self.comparison == "above" else projected < self.threshold
            if fired:
                alarm = Alarm(
                    self.node, self.direction, self.comparison, self.threshold,
                    current, projected, e, self.observed,
                )
        self.summary.update(e)
        return alarm


def monitor_observe(monitor: PointMonitor, e: StreamElement) -> Alarm | None:
    return monitor.observe(e)


def sketch_subset(summary: GLavaSummary, indices: Sequence[int]) -> GLavaSummary:
    """View of a summary restricted to some of its sketches (shares cell arrays)."""
    view = GLavaSummary([summary.sketches[i] for i in indices], summary.seed, summary.directed)
    view.elements, view.total_weight = summary.elements, summary.total_weight
    return view
