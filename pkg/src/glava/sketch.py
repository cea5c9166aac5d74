"""Graph sketches: dense bucket-adjacency matrices over hashed node labels.

A :class:`GraphSketch` keeps one ``m x p`` matrix whose cell ``[i][j]``
aggregates every stream element whose source hashes to row ``i`` and
destination to column ``j``. A :class:`GLavaSummary` keeps ``d`` sketches
built with independently drawn hash functions; every element updates each
of them.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from os import PathLike
from typing import Literal, NamedTuple, TextIO

import numpy as np

from glava.errors import (
    CorruptPayloadError,
    FormatVersionError,
    IncompatibleSummaryError,
    InvalidParameterError,
    InvalidShapeError,
    UnsupportedOperationError,
)
from glava.hashing import HashSpec, make_family
from glava.stream import StreamElement

Aggregation = Literal["sum", "count", "min", "max"]
AGGREGATIONS: tuple[str, ...] = ("sum", "count", "min", "max")
FORMAT_VERSION = 1


class MatrixShape(NamedTuple):
    m: int
    p: int

    @property
    def cells(self) -> int:
        return self.m * self.p

    @property
    def square(self) -> bool:
        return self.m == self.p

    def __str__(self) -> str:
        return f"{self.m}x{self.p}"


def parse_shape(text: str) -> MatrixShape:
    try:
        m, p = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise InvalidShapeError(f"shape must look like '7x2', got {text!r}") from None
    if m < 1 or p < 1:
        raise InvalidShapeError(f"shape dimensions must be positive, got {text!r}")
    return MatrixShape(m, p)


def resolve_schedule(
    d: int, cell_budget: int, schedule: str | Sequence[MatrixShape | tuple[int, int]] = "square"
) -> list[MatrixShape]:
    """Turn a schedule name or explicit shape list into ``d`` shapes of equal size.

    ``square`` needs a perfect-square budget. ``mixed`` cycles
    ``n*n, 2n*n/2, n/2*2n, 4n*n/4, n/4*4n`` and rounds the budget down to the
    largest ``n*n`` for which every shape it uses is integral.
    """
    if d < 1:
        raise InvalidParameterError(f"d must be at least 1, got {d}")
    if cell_budget < 1:
        raise InvalidParameterError(f"cell budget must be positive, got {cell_budget}")
    if schedule == "square":
        n = math.isqrt(cell_budget)
        if n * n != cell_budget:
            raise InvalidShapeError(f"cell budget {cell_budget} is not a perfect square")
        return [MatrixShape(n, n)] * d
    if schedule == "mixed":
        step = 4 if d >= 4 else 2 if d >= 2 else 1
        n = math.isqrt(cell_budget) // step * step
        if n == 0:
            raise InvalidShapeError(f"cell budget {cell_budget} too small for a mixed schedule of {d}")
        cycle = [
            MatrixShape(n, n),
            MatrixShape(2 * n, n // 2),
            MatrixShape(n // 2, 2 * n),
            MatrixShape(4 * n, n // 4),
            MatrixShape(n // 4, 4 * n),
        ]
        return [cycle[i % len(cycle)] for i in range(d)]
    if isinstance(schedule, str):
        shapes = [parse_shape(s) for s in schedule.split(",")]
    else:
        shapes = [MatrixShape(*s) for s in schedule]
    if len(shapes) != d:
        raise InvalidShapeError(f"explicit schedule lists {len(shapes)} shapes for d={d}")
    if any(s.cells != cell_budget for s in shapes):
        raise InvalidShapeError(
            f"every shape must hold {cell_budget} cells, got {[str(s) for s in shapes]}"
        )
    return shapes


class GraphSketch:
    """One hashed adjacency matrix.

    Square sketches may share one hash for rows and columns by passing
    ``col_hash=None``.
    """

    def __init__(
        self,
        shape: MatrixShape | tuple[int, int],
        row_hash: HashSpec,
        col_hash: HashSpec | None = None,
        aggregation: Aggregation = "sum",
        companions: bool = False,
    ) -> None:
        shape = MatrixShape(*shape)
        if aggregation not in AGGREGATIONS:
            raise InvalidParameterError(f"unknown aggregation {aggregation!r}")
        if col_hash is None and not shape.square:
            raise InvalidShapeError("non-square sketches need separate row and column hashes")
        if row_hash.w != shape.m:
            raise InvalidShapeError(f"row hash range {row_hash.w} does not match {shape.m} rows")
        if (col_hash or row_hash).w != shape.p:
            raise InvalidShapeError(f"column hash range {(col_hash or row_hash).w} does not match {shape.p} columns")
        self.shape = shape
        self.row_hash = row_hash
        self.col_hash = col_hash
        self.aggregation = aggregation
        if aggregation == "count":
            self.cells = np.zeros(shape, dtype=np.int64)
        elif aggregation == "min":
            self.cells = np.full(shape, np.inf)
        else:
            self.cells = np.zeros(shape, dtype=np.float64)
        self.companions = np.zeros(shape, dtype=np.int64) if companions else None
        self.touches = 0

    @property
    def shared_hash(self) -> bool:
        return self.col_hash is None

    def row_of(self, label: str) -> int:
        return self.row_hash(label) - 1

    def col_of(self, label: str) -> int:
        return (self.col_hash or self.row_hash)(label) - 1

    def update(self, e: StreamElement, sign: int = 1) -> None:
        r = self.row_hash(e.src) - 1
        c = (self.col_hash or self.row_hash)(e.dst) - 1
        agg = self.aggregation
        if agg == "sum":
            self.cells[r, c] += sign * e.weight
        elif agg == "count":
            self.cells[r, c] += sign
        elif sign < 0:
            raise UnsupportedOperationError(f"{agg} aggregation cannot delete elements")
        elif agg == "min":
            self.cells[r, c] = min(self.cells[r, c], e.weight)
        else:
            self.cells[r, c] = max(self.cells[r, c], e.weight)
        self.touches += 1
        if self.companions is not None:
            self.companions[r, c] += sign
            self.touches += 1

    def cell(self, a: str, b: str) -> float:
        return self.cells[self.row_of(a), self.col_of(b)].item()

    def mask(self) -> np.ndarray:
        """Cells that hold at least one positive-weight edge."""
        if self.aggregation == "min":
            return np.isfinite(self.cells) & (self.cells > 0)
        return self.cells > 0

    def compatible_with(self, other: GraphSketch) -> bool:
        return (
            self.shape == other.shape
            and self.row_hash == other.row_hash
            and self.col_hash == other.col_hash
            and self.aggregation == other.aggregation
            and (self.companions is None) == (other.companions is None)
        )

    def copy(self) -> GraphSketch:
        clone = GraphSketch(self.shape, self.row_hash, self.col_hash, self.aggregation, False)
        clone.cells = self.cells.copy()
        clone.companions = None if self.companions is None else self.companions.copy()
        clone.touches = self.touches
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSketch):
            return NotImplemented
        if not self.compatible_with(other) or not np.array_equal(self.cells, other.cells):
            return False
        return self.companions is None or np.array_equal(self.companions, other.companions)

    def __repr__(self) -> str:
        return f"GraphSketch({self.shape}, aggregation={self.aggregation!r})"


class GLavaSummary:
    """``d`` graph sketches over the same stream, each with its own hashing."""

    def __init__(
        self,
        sketches: Sequence[GraphSketch],
        seed: int | None = None,
        directed: bool = True,
    ) -> None:
        if not sketches:
            raise InvalidParameterError("a summary needs at least one sketch")
        aggs = {s.aggregation for s in sketches}
        if len(aggs) != 1:
            raise InvalidParameterError(f"sketches disagree on aggregation: {sorted(aggs)}")
        self.sketches = list(sketches)
        self.seed = seed
        self.directed = directed
        self.aggregation: Aggregation = aggs.pop()
        self.elements = 0
        self.total_weight = 0.0

    @classmethod
    def build(
        cls,
        d: int,
        cell_budget: int,
        schedule: str | Sequence[MatrixShape | tuple[int, int]] = "square",
        seed: int = 0,
        directed: bool = True,
        aggregation: Aggregation = "sum",
        companions: bool = False,
    ) -> GLavaSummary:
        shapes = resolve_schedule(d, cell_budget, schedule)
        family = make_family(seed, d, [r for s in shapes for r in s])
        sketches = []
        for i, shape in enumerate(shapes):
            row, col = family[2 * i], family[2 * i + 1]
            sketches.append(
                GraphSketch(shape, row, None if shape.square else col, aggregation, companions)
            )
        return cls(sketches, seed, directed)

    @classmethod
    def from_tables(
        cls,
        tables: Sequence[HashSpec | tuple[HashSpec, HashSpec]],
        directed: bool = True,
        aggregation: Aggregation = "sum",
        companions: bool = False,
    ) -> GLavaSummary:
        """Summary over fixed table hashes: one spec (square) or a (row, col) pair per sketch."""
        sketches = []
        for t in tables:
            row, col = (t if isinstance(t, tuple) else (t, None))
            shape = MatrixShape(row.w, (col or row).w)
            sketches.append(GraphSketch(shape, row, col, aggregation, companions))
        return cls(sketches, None, directed)

    @property
    def d(self) -> int:
        return len(self.sketches)

    @property
    def shapes(self) -> list[MatrixShape]:
        return [s.shape for s in self.sketches]

    @property
    def cell_count(self) -> int:
        return sum(s.shape.cells for s in self.sketches)

    @property
    def companions(self) -> bool:
        return self.sketches[0].companions is not None

    @property
    def touches(self) -> int:
        return sum(s.touches for s in self.sketches)

    def update(self, e: StreamElement, sign: int = 1) -> None:
        if sign not in (1, -1):
            raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
        if not self.directed:
            e = e.canonical()
        for s in self.sketches:
            s.update(e, sign)
        self.elements += sign
        self.total_weight += sign * e.weight

    def delete(self, e: StreamElement) -> None:
        self.update(e, -1)

    def extend(self, stream: Iterable[StreamElement]) -> GLavaSummary:
        for e in stream:
            self.update(e)
        return self

    def empty_like(self) -> GLavaSummary:
        sketches = [
            GraphSketch(s.shape, s.row_hash, s.col_hash, s.aggregation, s.companions is not None)
            for s in self.sketches
        ]
        return GLavaSummary(sketches, self.seed, self.directed)

    def copy(self) -> GLavaSummary:
        clone = GLavaSummary([s.copy() for s in self.sketches], self.seed, self.directed)
        clone.elements, clone.total_weight = self.elements, self.total_weight
        return clone

    def merge(self, other: GLavaSummary) -> GLavaSummary:
        """Cellwise sum of two summaries built with identical hashing."""
        if self.aggregation not in ("sum", "count"):
            raise UnsupportedOperationError(f"{self.aggregation} summaries cannot be merged additively")
        if (
            self.d != other.d
            or self.seed != other.seed
            or self.directed != other.directed
            or not all(a.compatible_with(b) for a, b in zip(self.sketches, other.sketches))
        ):
            raise IncompatibleSummaryError("summaries differ in d, seed, shapes, hashes or aggregation")
        merged = self.copy()
        for mine, theirs in zip(merged.sketches, other.sketches):
            mine.cells += theirs.cells
            if mine.companions is not None:
                mine.companions += theirs.companions
        merged.elements += other.elements
        merged.total_weight += other.total_weight
        return merged

    __add__ = merge

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GLavaSummary):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.directed == other.directed
            and self.d == other.d
            and all(a == b for a, b in zip(self.sketches, other.sketches))
        )

    def __repr__(self) -> str:
        shapes = ", ".join(str(s) for s in self.shapes)
        return f"GLavaSummary(d={self.d}, shapes=[{shapes}], aggregation={self.aggregation!r})"

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        def flat(a: np.ndarray) -> list:
            if self.aggregation == "min":
                return [None if math.isinf(x) else x for x in a.ravel().tolist()]
            return a.ravel().tolist()

        return {
            "format": "glava-summary",
            "format_version": FORMAT_VERSION,
            "d": self.d,
            "directed": self.directed,
            "aggregation": self.aggregation,
            "seed": self.seed,
            "shapes": [list(s) for s in self.shapes],
            "elements": self.elements,
            "total_weight": self.total_weight,
            "sketches": [
                {
                    "row_hash": s.row_hash.to_dict(),
                    "col_hash": None if s.col_hash is None else s.col_hash.to_dict(),
                    "cells": flat(s.cells),
                    "companions": None if s.companions is None else s.companions.ravel().tolist(),
                }
                for s in self.sketches
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> GLavaSummary:
        if not isinstance(doc, dict) or doc.get("format") != "glava-summary":
            raise CorruptPayloadError("not a glava summary document")
        version = doc.get("format_version")
        if not isinstance(version, int):
            raise CorruptPayloadError("missing format_version")
        if version != FORMAT_VERSION:
            raise FormatVersionError(f"unsupported format version {version} (expected {FORMAT_VERSION})")
        try:
            aggregation = doc["aggregation"]
            shapes = [MatrixShape(int(m), int(p)) for m, p in doc["shapes"]]
            if len(shapes) != doc["d"] or len(doc["sketches"]) != doc["d"]:
                raise CorruptPayloadError("sketch count does not match d")
            sketches = []
            for shape, sd in zip(shapes, doc["sketches"]):
                row = HashSpec.from_dict(sd["row_hash"])
                col = None if sd["col_hash"] is None else HashSpec.from_dict(sd["col_hash"])
                s = GraphSketch(shape, row, col, aggregation, sd["companions"] is not None)
                raw = sd["cells"]
                if len(raw) != shape.cells:
                    raise CorruptPayloadError(f"sketch expects {shape.cells} cells, found {len(raw)}")
                if aggregation == "min":
                    raw = [math.inf if x is None else x for x in raw]
                s.cells[...] = np.asarray(raw, dtype=s.cells.dtype).reshape(shape)
                if s.companions is not None:
                    if len(sd["companions"]) != shape.cells:
                        raise CorruptPayloadError("companion array has the wrong length")
                    s.companions[...] = np.asarray(sd["companions"], dtype=np.int64).reshape(shape)
                sketches.append(s)
            summary = cls(sketches, doc["seed"], bool(doc["directed"]))
            summary.elements = int(doc.get("elements", 0))
            summary.total_weight = float(doc.get("total_weight", 0.0))
        except CorruptPayloadError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptPayloadError(f"malformed summary document: {exc}") from exc
        return summary

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> GLavaSummary:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptPayloadError(f"summary payload is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def save(self, sink: str | PathLike | TextIO) -> None:
        if hasattr(sink, "write"):
            sink.write(self.dumps())
            return
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, source: str | PathLike | TextIO) -> GLavaSummary:
        if hasattr(source, "read"):
            return cls.loads(source.read())
        with open(source, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def summary_new(
    d: int,
    cell_budget: int,
    schedule: str | Sequence[MatrixShape | tuple[int, int]] = "square",
    seed: int = 0,
    directed: bool = True,
    aggregation: Aggregation = "sum",
    companions: bool = False,
) -> GLavaSummary:
    return GLavaSummary.build(d, cell_budget, schedule, seed, directed, aggregation, companions)
