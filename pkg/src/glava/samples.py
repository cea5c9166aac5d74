"""A small worked stream and the fixed bucket maps used to illustrate it.

The 14-edge directed stream over labels ``a``..``g`` is small enough to
check every sketch cell by hand. Each bucket map below is a table hash
(1-based buckets) that reproduces one hand-built sketch of that stream.
"""

from __future__ import annotations

from glava.hashing import HashSpec
from glava.stream import StreamElement

SAMPLE_EDGES: tuple[tuple[str, str], ...] = (
    ("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "e"), ("c", "f"), ("e", "d"),
    ("e", "f"), ("e", "b"), ("d", "g"), ("g", "b"), ("b", "f"), ("f", "a"), ("b", "a"),
)


def sample_stream() -> list[StreamElement]:
    """The 14 unit-weight elements, timestamps 1..14 in arrival order."""
    return [StreamElement(x, y, 1.0, float(t)) for t, (x, y) in enumerate(SAMPLE_EDGES, start=1)]


def _groups(*groups: str) -> dict[str, int]:
    return {label: i for i, members in enumerate(groups, start=1) for label in members}


# buckets I(ae) II(bf) III(cg) IV(d): the single-sketch example
SINGLE_SKETCH = HashSpec.from_table(_groups("ae", "bf", "cg", "d"), 4)

# the two sketches of the d=2 example: I(af) II(bc) III(dg) IV(e) and i(ab) ii(cd) iii(g) iv(ef)
PAIR_FIRST = HashSpec.from_table(_groups("af", "bc", "dg", "e"), 4)
PAIR_SECOND = HashSpec.from_table(_groups("ab", "cd", "g", "ef"), 4)

# non-square 7x2 layout: one row per label, columns i(abcd) ii(efg)
NONSQUARE_ROWS = HashSpec.from_table(_groups(*"abcdefg"), 7)
NONSQUARE_COLS = HashSpec.from_table(_groups("abcd", "efg"), 2)

# one bucket per label: collision-free hashing of the sample stream
INJECTIVE = HashSpec.from_table(_groups(*"abcdefg"), 7)

# CountMin baseline with w=4 over concatenated pair keys
COUNTMIN_PAIR_GROUPS: tuple[tuple[tuple[str, str], ...], ...] = (
    (("a", "b"), ("a", "c"), ("e", "d"), ("e", "b"), ("e", "f")),
    (("b", "c"), ("b", "d"), ("b", "a"), ("b", "f"), ("f", "a")),
    (("c", "e"), ("c", "f"), ("g", "b")),
    (("d", "g"),),
)


def injective_table(labels) -> HashSpec:
    """Table hash giving every label its own bucket."""
    return HashSpec.from_table({x: i for i, x in enumerate(sorted(set(labels)), start=1)})
