"""Exact, uncompressed aggregation of a graph stream.

This is ground truth for tests and experiments, not a scalable store.
"""

from __future__ import annotations

from collections import defaultdict, deque
from collections.abc import Iterable

from glava.errors import DirectionError, InvalidDeletionError, InvalidParameterError
from glava.pattern import SubgraphQuery, compile_query, match
from glava.stream import Direction, NodeLabel, StreamElement


class ExactGraph:
    """Aggregated multigraph keyed by ordered label pairs (sum aggregation).

    Undirected graphs store each pair with the lexicographically smaller
    label first.
    """

    def __init__(self, directed: bool = True) -> None:
        self.directed = directed
        self.weights: dict[tuple[NodeLabel, NodeLabel], float] = {}
        self.nodes: set[NodeLabel] = set()
        self.total_weight = 0.0

    @classmethod
    def from_stream(cls, stream: Iterable[StreamElement], directed: bool = True) -> ExactGraph:
        g = cls(directed)
        for e in stream:
            g.apply(e)
        return g

    def _key(self, a: NodeLabel, b: NodeLabel) -> tuple[NodeLabel, NodeLabel]:
        if not self.directed and b < a:
            return b, a
        return a, b

    def apply(self, e: StreamElement, sign: int = 1) -> None:
        if sign not in (1, -1):
            raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
        key = self._key(e.src, e.dst)
        new = self.weights.get(key, 0.0) + sign * e.weight
        if new < 0:
            raise InvalidDeletionError(
                f"deleting {e.weight} from ({e.src},{e.dst}) would leave weight {new}"
            )
        self.weights[key] = new
        self.nodes.update(key)
        self.total_weight += sign * e.weight

    def delete(self, e: StreamElement) -> None:
        self.apply(e, -1)

    def edge(self, a: NodeLabel, b: NodeLabel) -> float:
        return self.weights.get(self._key(a, b), 0.0)

    def _check_direction(self, direction: Direction) -> None:
        if direction == "undirected" and self.directed:
            raise DirectionError("undirected flow requires an undirected graph")
        if direction in ("in", "out") and not self.directed:
            raise DirectionError(f"{direction!r} flow requires a directed graph")
        if direction not in ("in", "out", "undirected"):
            raise DirectionError(f"unknown direction {direction!r}")

    def _incident(self, a: NodeLabel, direction: Direction):
        self._check_direction(direction)
        for (x, y), w in self.weights.items():
            if direction == "in" and y == a:
                yield x, w
            elif direction == "out" and x == a:
                yield y, w
            elif direction == "undirected" and a in (x, y):
                yield (y if x == a else x), w

    def flow(self, a: NodeLabel, direction: Direction) -> float:
        return sum(w for _, w in self._incident(a, direction))

    def degree(self, a: NodeLabel, direction: Direction) -> int:
        """Number of distinct neighbours joined to ``a`` by positive weight."""
        return len({x for x, w in self._incident(a, direction) if w > 0})

    def adjacency(self) -> dict[NodeLabel, set[NodeLabel]]:
        adj: dict[NodeLabel, set[NodeLabel]] = defaultdict(set)
        for (x, y), w in self.weights.items():
            if w > 0:
                adj[x].add(y)
                if not self.directed:
                    adj[y].add(x)
        return adj

    def reach(self, a: NodeLabel, b: NodeLabel) -> bool:
        if a == b:
            return True
        adj = self.adjacency()
        seen = {a}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for y in adj.get(x, ()):
                if y == b:
                    return True
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return False

    def subgraph(self, query: SubgraphQuery) -> float:
        variables, edges = compile_query(query)
        labels = sorted(self.nodes)
        return match(
            edges,
            [labels] * len(variables),
            resolve_const=lambda label: label,
            weight=lambda u, v, same: self.edge(u, v),
            mode=query.mode,
        )

    def __len__(self) -> int:
        return sum(1 for w in self.weights.values() if w > 0)
