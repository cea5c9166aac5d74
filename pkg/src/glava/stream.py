"""Stream elements and the plain-text stream format.

A stream file holds one element per line::

    # comment
    src dst [weight] [timestamp]

Fields may be separated by whitespace or commas. Missing weights default
to 1, missing timestamps to 0.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Literal, TextIO

from glava.errors import ParseError

NodeLabel = str
Direction = Literal["in", "out", "undirected"]
DIRECTIONS: tuple[str, ...] = ("in", "out", "undirected")

_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True, slots=True)
class StreamElement:
    src: NodeLabel
    dst: NodeLabel
    weight: float = 1.0
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if not self.src or not self.dst:
            raise ValueError("node labels must be non-empty")
        if not (self.weight >= 0 and math.isfinite(self.weight)):
            raise ValueError(f"weight must be finite and non-negative, got {self.weight}")

    def canonical(self) -> StreamElement:
        """Same element with endpoints in lexicographic order (undirected storage)."""
        if self.dst < self.src:
            return StreamElement(self.dst, self.src, self.weight, self.timestamp)
        return self


def check_label(label: str) -> NodeLabel:
    if not label or not label.isprintable() or any(ch.isspace() for ch in label):
        raise ParseError("labels must be non-empty, printable and free of whitespace", label)
    return label


def _number(token: str, what: str, line: str, lineno: int | None) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what} is not a number", line, lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} must be finite", line, lineno)
    return value


def parse_element(line: str, lineno: int | None = None) -> StreamElement | None:
    """Parse one stream line; returns None for blank lines and comments."""
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    tokens = [t for t in _SPLIT.split(text) if t]
    if len(tokens) < 2 or len(tokens) > 4:
        raise ParseError("expected 'src dst [weight] [timestamp]'", line.rstrip("\n"), lineno)
    try:
        src, dst = check_label(tokens[0]), check_label(tokens[1])
    except ParseError as exc:
        raise ParseError(str(exc), line.rstrip("\n"), lineno) from None
    weight = _number(tokens[2], "weight", line.rstrip("\n"), lineno) if len(tokens) > 2 else 1.0
    if weight < 0:
        raise ParseError("negative weight", line.rstrip("\n"), lineno)
    ts = _number(tokens[3], "timestamp", line.rstrip("\n"), lineno) if len(tokens) > 3 else 0.0
    if ts < 0:
        raise ParseError("negative timestamp", line.rstrip("\n"), lineno)
    return StreamElement(src, dst, weight, ts)


def read_stream(lines: Iterable[str] | TextIO) -> Iterator[StreamElement]:
    """Lazily parse a stream, skipping comments. Raises on the first bad line."""
    for lineno, line in enumerate(lines, start=1):
        element = parse_element(line, lineno)
        if element is not None:
            yield element


def format_element(e: StreamElement) -> str:
    return f"{e.src} {e.dst} {e.weight:g} {e.timestamp:g}"
