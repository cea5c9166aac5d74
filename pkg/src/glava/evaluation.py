"""Baselines, synthetic streams and empirical error measurement."""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from glava.errors import InvalidParameterError, InvalidShapeError, UnsupportedPatternError
from glava.hashing import HashSpec, make_family
from glava.oracle import ExactGraph
from glava.pattern import SubgraphQuery
from glava.query import estimate_edge
from glava.samples import injective_table
from glava.sketch import GLavaSummary, resolve_schedule
from glava.stream import StreamElement

KEY_SEPARATOR = "\x1f"


# -- sizing -----------------------------------------------------------------

@dataclass(frozen=True)
class BoundParams:
    epsilon: float
    delta: float

    @property
    def d(self) -> int:
        return math.ceil(math.log(1 / self.delta))

    @property
    def w(self) -> int:
        return math.ceil(math.e / self.epsilon)


def size_for_bounds(epsilon: float, delta: float) -> BoundParams:
    """Sketch count ``ceil(ln 1/delta)`` and width ``ceil(e/epsilon)``."""
    if not 0 < epsilon < 1:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    return BoundParams(epsilon, delta)


# -- CountMin baseline --------------------------------------------------------

def pair_key(a: str, b: str) -> str:
    return f"{a}{KEY_SEPARATOR}{b}"


class CountMinSketch:
    """Edge-keyed CountMin: one counter row per hash, keyed by the label pair."""

    def __init__(self, hashes: Sequence[HashSpec]) -> None:
        if not hashes:
            raise InvalidParameterError("CountMin needs at least one hash function")
        self.hashes = list(hashes)
        self.counters = [np.zeros(h.w) for h in self.hashes]

    @classmethod
    def build(cls, d: int, w: int, seed: int = 0) -> CountMinSketch:
        return cls(make_family(seed, d, [w] * d))

    @classmethod
    def from_bounds(cls, epsilon: float, delta: float, seed: int = 0) -> CountMinSketch:
        params = size_for_bounds(epsilon, delta)
        return cls.build(params.d, params.w, seed)

    @classmethod
    def from_pair_groups(cls, groups: Sequence[Sequence[tuple[str, str]]]) -> CountMinSketch:
        """Single-row sketch with group ``i`` of label pairs sent to bucket ``i + 1``."""
        table = {pair_key(a, b): i for i, group in enumerate(groups, start=1) for a, b in group}
        return cls([HashSpec.from_table(table, len(groups))])

    @property
    def d(self) -> int:
        return len(self.hashes)

    def update(self, e: StreamElement, sign: int = 1) -> None:
        key = pair_key(e.src, e.dst)
        for h, row in zip(self.hashes, self.counters):
            row[h(key) - 1] += sign * e.weight

    def extend(self, stream) -> CountMinSketch:
        for e in stream:
            self.update(e)
        return self

    def estimate(self, a: str, b: str) -> float:
        key = pair_key(a, b)
        return min(row[h(key) - 1].item() for h, row in zip(self.hashes, self.counters))

    def aggregate_subgraph(self, query: SubgraphQuery | Sequence[tuple[str, str]]) -> float:
        """Plain sum of per-edge estimates; missing edges do not zero the total."""
        if isinstance(query, SubgraphQuery):
            if not query.constants_only:
                raise UnsupportedPatternError("CountMin cannot evaluate wildcard patterns")
            pairs = [(u.label, v.label) for u, v in query.edges]
        else:
            pairs = list(query)
        return math.fsum(self.estimate(a, b) for a, b in pairs)


def cm_update(cm: CountMinSketch, e: StreamElement) -> None:
    cm.update(e)


def cm_estimate(cm: CountMinSketch, a: str, b: str) -> float:
    return cm.estimate(a, b)


def cm_aggregate_subgraph(cm: CountMinSketch, query) -> float:
    return cm.aggregate_subgraph(query)


# -- synthetic streams ----------------------------------------------------------

STREAM_KINDS = ("uniform", "zipf", "planted")


@dataclass(frozen=True)
class StreamModel:
    kind: str = "zipf"
    n_nodes: int = 500
    n_elements: int = 20_000
    seed: int = 0
    exponent: float = 1.1
    planted: tuple[tuple[str, str], ...] = ()
    background: str = "uniform"
    max_weight: int = 1

    def __post_init__(self) -> None:
        if self.kind not in STREAM_KINDS:
            raise InvalidParameterError(f"unknown stream kind {self.kind!r}")
        if self.n_nodes < 1 or self.n_elements < 0:
            raise InvalidParameterError("need n_nodes >= 1 and n_elements >= 0")
        if self.exponent <= 0 and "zipf" in (self.kind, self.background):
            raise InvalidParameterError(f"zipf exponent must be positive, got {self.exponent}")
        if self.kind == "planted" and self.background not in ("uniform", "zipf"):
            raise InvalidParameterError(f"unknown background {self.background!r}")
        if len(self.planted) > self.n_elements:
            raise InvalidParameterError("more planted edges than stream elements")
        if self.max_weight < 1:
            raise InvalidParameterError("max_weight must be at least 1")

    def replace(self, **changes) -> StreamModel:
        return StreamModel(**{**self.__dict__, **changes})

    def labels(self) -> list[str]:
        return [f"n{k}" for k in range(self.n_nodes)]


def planted_positions(model: StreamModel) -> list[int]:
    """Stream positions (0-based) holding the planted edges, in order."""
    if model.kind != "planted" or not model.planted:
        return []
    rng = np.random.default_rng([model.seed, 1])
    return sorted(rng.choice(model.n_elements, size=len(model.planted), replace=False).tolist())


def iter_stream(model: StreamModel, chunk: int = 1 << 14) -> Iterator[StreamElement]:
    """Lazily generate ``model.n_elements`` elements; deterministic per seed."""
    rng = np.random.default_rng(model.seed)
    labels = model.labels()
    dist = model.background if model.kind == "planted" else model.kind
    probs = None
    if dist == "zipf":
        ranks = np.arange(1, model.n_nodes + 1, dtype=float)
        probs = ranks ** -model.exponent
        probs /= probs.sum()
    planted = dict(zip(planted_positions(model), model.planted))
    produced = 0
    while produced < model.n_elements:
        size = min(chunk, model.n_elements - produced)
        if probs is None:
            src = rng.integers(model.n_nodes, size=size)
            dst = rng.integers(model.n_nodes, size=size)
        else:
            src = rng.choice(model.n_nodes, size=size, p=probs)
            dst = rng.choice(model.n_nodes, size=size, p=probs)
        if model.max_weight > 1:
            weights = rng.integers(1, model.max_weight + 1, size=size).tolist()
        else:
            weights = [1] * size
        for s, t, w in zip(src.tolist(), dst.tolist(), weights):
            if produced in planted:
                x, y = planted[produced]
                yield StreamElement(x, y, 1.0, float(produced))
            else:
                yield StreamElement(labels[s], labels[t], float(w), float(produced))
            produced += 1


def gen_stream(model: StreamModel) -> list[StreamElement]:
    return list(iter_stream(model))


def sample_queries(oracle: ExactGraph, k: int, seed: int = 0) -> list[tuple[str, str]]:
    """Half present edges, half uniformly random label pairs."""
    rng = np.random.default_rng(seed)
    present = sorted(pair for pair, w in oracle.weights.items() if w > 0)
    labels = sorted(oracle.nodes)
    out = []
    for i in range(k):
        if present and i % 2 == 0:
            out.append(present[rng.integers(len(present))])
        elif labels:
            out.append((labels[rng.integers(len(labels))], labels[rng.integers(len(labels))]))
    return out


# -- error measurement ----------------------------------------------------------

@dataclass(frozen=True)
class QueryError:
    src: str
    dst: str
    exact: float
    estimate: float

    @property
    def error(self) -> float:
        return self.estimate - self.exact


@dataclass
class ErrorReport:
    """Additive errors of edge estimates against the exact oracle.

    A query violates the bound when its error exceeds ``epsilon * N`` where
    N is the total stream weight; ``node_violation_rate`` uses
    ``epsilon * n_nodes`` instead.
    """

    epsilon: float
    total_weight: float
    n_nodes: int
    queries: list[QueryError] = field(default_factory=list)
    label: str = ""

    @property
    def threshold(self) -> float:
        return self.epsilon * self.total_weight

    @property
    def node_threshold(self) -> float:
        return self.epsilon * self.n_nodes

    @property
    def errors(self) -> list[float]:
        return [q.error for q in self.queries]

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.errors)) if self.queries else 0.0

    @property
    def max_error(self) -> float:
        return max(self.errors, default=0.0)

    @property
    def underestimates(self) -> int:
        return sum(1 for e in self.errors if e < 0)

    def _rate(self, limit: float) -> float:
        if not self.queries:
            return 0.0
        return sum(1 for e in self.errors if e > limit) / len(self.queries)

    @property
    def violation_rate(self) -> float:
        return self._rate(self.threshold)

    @property
    def node_violation_rate(self) -> float:
        return self._rate(self.node_threshold)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "queries": len(self.queries),
            "total_weight": self.total_weight,
            "n_nodes": self.n_nodes,
            "epsilon": self.epsilon,
            "threshold": self.threshold,
            "node_threshold": self.node_threshold,
            "mean_error": self.mean_error,
            "max_error": self.max_error,
            "underestimates": self.underestimates,
            "violation_rate": self.violation_rate,
            "node_violation_rate": self.node_violation_rate,
        }

    def records(self) -> list[dict]:
        return [
            {"src": q.src, "dst": q.dst, "exact": q.exact, "estimate": q.estimate, "error": q.error}
            for q in self.queries
        ]


def _edge_estimator(estimator) -> Callable[[str, str], float]:
    if isinstance(estimator, GLavaSummary):
        return lambda a, b: estimate_edge(estimator, a, b).value
    if isinstance(estimator, CountMinSketch):
        return estimator.estimate
    if callable(estimator):
        return estimator
    raise InvalidParameterError(f"cannot estimate edges with {type(estimator).__name__}")


def measure_error(
    estimator,
    oracle: ExactGraph,
    queries: Sequence[tuple[str, str]],
    epsilon: float,
    n_nodes: int | None = None,
    label: str = "",
) -> ErrorReport:
    estimate = _edge_estimator(estimator)
    report = ErrorReport(
        epsilon, oracle.total_weight, n_nodes if n_nodes is not None else len(oracle.nodes), label=label
    )
    for a, b in queries:
        report.queries.append(QueryError(a, b, oracle.edge(a, b), estimate(a, b)))
    return report


# -- experiments ------------------------------------------------------------------

@dataclass
class ValidationResult:
    params: BoundParams
    reports: list[ErrorReport]

    @property
    def queries(self) -> int:
        return sum(len(r.queries) for r in self.reports)

    @property
    def violation_rate(self) -> float:
        if not self.queries:
            return 0.0
        return sum(r.violation_rate * len(r.queries) for r in self.reports) / self.queries

    @property
    def node_violation_rate(self) -> float:
        if not self.queries:
            return 0.0
        return sum(r.node_violation_rate * len(r.queries) for r in self.reports) / self.queries

    @property
    def underestimates(self) -> int:
        return sum(r.underestimates for r in self.reports)

    @property
    def passed(self) -> bool:
        return self.violation_rate <= self.params.delta and self.underestimates == 0


def validate_bounds(
    epsilon: float = 0.05,
    delta: float = 0.05,
    model: StreamModel | None = None,
    trials: int = 20,
    queries: int = 200,
    seed: int = 0,
    injective: bool = False,
) -> ValidationResult:
    """Build ``trials`` independently seeded summaries sized from (epsilon, delta).

    Each trial draws its own stream and hash family, answers ``queries``
    edge queries and compares them with the exact oracle.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be at least 1, got {trials}")
    if queries < 1:
        raise InvalidParameterError(f"queries must be at least 1, got {queries}")
    params = size_for_bounds(epsilon, delta)
    model = model or StreamModel()
    reports = []
    for t in range(trials):
        trial_model = model.replace(seed=model.seed + t)
        stream = gen_stream(trial_model)
        oracle = ExactGraph.from_stream(stream)
        if injective:
            table = injective_table(trial_model.labels() + sorted(oracle.nodes))
            summary = GLavaSummary.from_tables([table] * params.d)
        else:
            summary = GLavaSummary.build(params.d, params.w**2, "square", seed=seed + t)
        summary.extend(stream)
        qs = sample_queries(oracle, queries, seed=seed + t)
        reports.append(
            measure_error(summary, oracle, qs, epsilon, model.n_nodes, label=f"trial-{t}")
        )
    return ValidationResult(params, reports)


@dataclass
class ShapeComparison:
    cell_budget: int
    shapes: dict[str, list]
    reports: dict[str, ErrorReport]

    def table(self) -> str:
        shapes = {name: ",".join(str(s) for s in v) for name, v in self.shapes.items()}
        nw = max(8, *(len(n) for n in self.reports))
        sw = max(6, *(len(s) for s in shapes.values()))
        head = f"{'schedule':<{nw}}  {'shapes':<{sw}} {'mean err':>10} {'max err':>10} {'viol.':>7}"
        lines = [head, "-" * len(head)]
        for name, report in self.reports.items():
            lines.append(
                f"{name:<{nw}}  {shapes[name]:<{sw}} {report.mean_error:>10.3f} {report.max_error:>10.3f}"
                f" {report.violation_rate:>7.3f}"
            )
        return "\n".join(lines)


def compare_shapes(
    cell_budget: int,
    schedules: Sequence[str],
    model: StreamModel,
    queries: Sequence[tuple[str, str]] | int = 200,
    d: int = 3,
    seed: int = 0,
    epsilon: float = 0.05,
) -> ShapeComparison:
    """Same stream, same budget, different matrix shapes; no winner is implied."""
    if not schedules:
        raise InvalidParameterError("need at least one schedule to compare")
    resolved = {}
    for name in schedules:
        shapes = resolve_schedule(d, cell_budget, name)
        if any(s.cells != cell_budget for s in shapes):
            raise InvalidShapeError(
                f"schedule {name!r} realises {shapes[0].cells} cells, not {cell_budget}"
            )
        resolved[name] = shapes
    stream = gen_stream(model)
    oracle = ExactGraph.from_stream(stream)
    if isinstance(queries, int):
        queries = sample_queries(oracle, queries, seed=seed)
    reports = {}
    for name, shapes in resolved.items():
        summary = GLavaSummary.build(d, cell_budget, shapes, seed=seed).extend(stream)
        reports[name] = measure_error(summary, oracle, queries, epsilon, model.n_nodes, label=name)
    return ShapeComparison(cell_budget, {k: list(v) for k, v in resolved.items()}, reports)


def time_build(stream: Sequence[StreamElement], repeats: int = 3, **summary_args) -> float:
    """Best-of-``repeats`` wall-clock seconds to build a summary from ``stream``."""
    best = math.inf
    for _ in range(repeats):
        summary = GLavaSummary.build(**summary_args)
        start = time.perf_counter()
        for e in stream:
            summary.update(e)
        best = min(best, time.perf_counter() - start)
    return best
