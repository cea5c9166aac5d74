"""Subgraph query patterns and the backtracking matcher behind them.

Pattern text has one edge per line with two tokens. A token is a constant
label, ``*`` (a free wildcard, every occurrence independent) or ``*<id>``
(a bound wildcard; equal ids must match the same node)::

    *1 b
    b  c
    c  *1

The matcher is shared by the exact oracle (domain = original labels) and
the sketch estimators (domain = sketch buckets).
"""

from __future__ import annotations

import re
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Literal

from glava.errors import ComplexityGuardError, InvalidParameterError, ParseError
from glava.stream import check_label

MatchMode = Literal["sum_weights", "count_matches"]
MATCH_MODES: tuple[str, ...] = ("sum_weights", "count_matches")
MAX_WILDCARDS = 8

_BOUND = re.compile(r"\*(\d+)")


@dataclass(frozen=True)
class Endpoint:
    label: str | None = None
    bound: int | None = None

    @classmethod
    def const(cls, label: str) -> Endpoint:
        return cls(label=label)

    @classmethod
    def free(cls) -> Endpoint:
        return cls()

    @classmethod
    def bound_to(cls, ident: int) -> Endpoint:
        if ident < 1:
            raise InvalidParameterError(f"bound wildcard ids must be positive, got {ident}")
        return cls(bound=ident)

    @property
    def is_constant(self) -> bool:
        return self.label is not None

    @property
    def is_free(self) -> bool:
        return self.label is None and self.bound is None

    @property
    def is_bound(self) -> bool:
        return self.bound is not None

    def __str__(self) -> str:
        if self.label is not None:
            return self.label
        return "*" if self.bound is None else f"*{self.bound}"


def parse_endpoint(token: str) -> Endpoint:
    if token == "*":
        return Endpoint.free()
    m = _BOUND.fullmatch(token)
    if m:
        return Endpoint.bound_to(int(m.group(1)))
    if token.startswith("*"):
        raise ParseError("wildcards are '*' or '*<digits>'", token)
    return Endpoint.const(check_label(token))


@dataclass(frozen=True)
class SubgraphQuery:
    edges: tuple[tuple[Endpoint, Endpoint], ...]
    mode: MatchMode = "sum_weights"

    def __post_init__(self) -> None:
        if not self.edges:
            raise InvalidParameterError("a subgraph query needs at least one edge")
        if self.mode not in MATCH_MODES:
            raise InvalidParameterError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, str]], mode: MatchMode = "sum_weights") -> SubgraphQuery:
        """Build from token pairs, e.g. ``SubgraphQuery.of([("*1", "b"), ("b", "c")])``."""
        return cls(tuple((parse_endpoint(a), parse_endpoint(b)) for a, b in pairs), mode)

    @property
    def constants_only(self) -> bool:
        return all(u.is_constant and v.is_constant for u, v in self.edges)

    @property
    def has_bound(self) -> bool:
        return any(u.is_bound or v.is_bound for u, v in self.edges)

    def wildcard_count(self) -> int:
        free = sum(u.is_free + v.is_free for u, v in self.edges)
        bound = {p.bound for e in self.edges for p in e if p.is_bound}
        return free + len(bound)

    def __str__(self) -> str:
        return "{" + ", ".join(f"({u},{v})" for u, v in self.edges) + "}"


def parse_pattern(text: str, mode: MatchMode = "sum_weights") -> SubgraphQuery:
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise ParseError("pattern lines hold exactly two tokens", line, lineno)
        try:
            edges.append((parse_endpoint(tokens[0]), parse_endpoint(tokens[1])))
        except (ParseError, InvalidParameterError) as exc:
            raise ParseError(str(exc), line, lineno) from None
    if not edges:
        raise ParseError("pattern has no edges")
    return SubgraphQuery(tuple(edges), mode)


# -- matcher ---------------------------------------------------------------

@dataclass
class Variable:
    """One wildcard to assign: a bound id or a single free occurrence."""

    key: Hashable
    as_source: bool = False
    as_target: bool = False


def compile_query(query: SubgraphQuery):
    """Split a query into variables and edges over ('const', label) / ('var', index)."""
    if query.wildcard_count() > MAX_WILDCARDS:
        raise ComplexityGuardError(
            f"pattern uses {query.wildcard_count()} wildcards; at most {MAX_WILDCARDS} allowed"
        )
    variables: list[Variable] = []
    index: dict[Hashable, int] = {}

    def ref(p: Endpoint, pos: int, role: str):
        if p.is_constant:
            return ("const", p.label)
        key = ("bound", p.bound) if p.is_bound else ("free", pos, role)
        if key not in index:
            index[key] = len(variables)
            variables.append(Variable(key))
        var = variables[index[key]]
        if role == "src":
            var.as_source = True
        else:
            var.as_target = True
        return ("var", index[key])

    edges = [(ref(u, i, "src"), ref(v, i, "dst")) for i, (u, v) in enumerate(query.edges)]
    return variables, edges


def match(
    edges: Sequence[tuple[tuple, tuple]],
    domains: Sequence[Sequence],
    resolve_const: Callable[[str], object],
    weight: Callable[[object, object, bool], float],
    mode: MatchMode,
) -> float:
    """Aggregate over all variable assignments where every edge has positive weight.

    ``weight(u, v, same)`` returns the weight between two resolved nodes;
    ``same`` is true when both endpoints are the same query variable.
    Returns the match count, or the sum over matches of the matched edge
    weights, depending on ``mode``.
    """
    n = len(domains)
    const_cache: dict[str, object] = {}

    def node(ref, assignment):
        kind, val = ref
        if kind == "const":
            if val not in const_cache:
                const_cache[val] = resolve_const(val)
            return const_cache[val]
        return assignment[val]

    # an edge is checked as soon as its last variable is assigned
    ready: list[list[tuple]] = [[] for _ in range(n + 1)]
    for u, v in edges:
        last = max((r[1] for r in (u, v) if r[0] == "var"), default=-1)
        same = u[0] == "var" and u == v
        ready[last + 1].append((u, v, same))

    assignment: list[object] = [None] * n
    count = 0
    total = 0.0

    def check(level: int) -> float | None:
        acc = 0.0
        for u, v, same in ready[level]:
            w = weight(node(u, assignment), node(v, assignment), same)
            if not w > 0:
                return None
            acc += w
        return acc

    base = check(0)
    if base is None:
        return 0.0

    def descend(k: int, partial: float) -> None:
        nonlocal count, total
        if k == n:
            count += 1
            total += partial
            return
        for value in domains[k]:
            assignment[k] = value
            gained = check(k + 1)
            if gained is not None:
                descend(k + 1, partial + gained)
        assignment[k] = None

    descend(0, base)
    return float(count) if mode == "count_matches" else total
