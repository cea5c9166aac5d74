"""Pairwise-independent hashing of node labels into buckets ``1..w``.

Parametric specs use ``((a * digest(x) + b) mod p) mod w + 1`` where the
digest is a fixed 64-bit BLAKE2b of the UTF-8 label and ``p = 2**64 + 13``
is the smallest prime above every digest. Table specs pin explicit
label-to-bucket maps and exist for deterministic fixtures.
"""

from __future__ import annotations

import functools
import hashlib
import random
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal

from glava.errors import InvalidParameterError, UnknownLabelError

PRIME = 2**64 + 13


@functools.lru_cache(maxsize=1 << 16)
def label_digest(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class HashSpec:
    kind: Literal["parametric", "table"]
    w: int
    a: int = 0
    b: int = 0
    p: int = PRIME
    table: Mapping[str, int] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.w < 1:
            raise InvalidParameterError(f"hash range must be positive, got {self.w}")
        if self.kind == "parametric":
            if not (1 <= self.a < self.p and 0 <= self.b < self.p):
                raise InvalidParameterError("need 1 <= a < p and 0 <= b < p")
            if self.p <= 2**64:
                raise InvalidParameterError("p must exceed every 64-bit digest")
        elif self.kind == "table":
            bad = {k: v for k, v in self.table.items() if not 1 <= v <= self.w}
            if bad:
                raise InvalidParameterError(f"table buckets outside 1..{self.w}: {bad}")
            object.__setattr__(self, "table", dict(self.table))
        else:
            raise InvalidParameterError(f"unknown hash kind {self.kind!r}")

    @classmethod
    def from_table(cls, table: Mapping[str, int], w: int | None = None) -> HashSpec:
        if w is None:
            w = max(table.values(), default=1)
        return cls("table", w, table=table)

    def __call__(self, label: str) -> int:
        if self.kind == "table":
            try:
                return self.table[label]
            except KeyError:
                raise UnknownLabelError(f"label {label!r} is not in the hash table") from None
        return (self.a * label_digest(label) + self.b) % self.p % self.w + 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HashSpec):
            return NotImplemented
        return (self.kind, self.w, self.a, self.b, self.p) == (
            other.kind, other.w, other.a, other.b, other.p
        ) and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.kind, self.w, self.a, self.b, self.p, frozenset(self.table.items())))

    def to_dict(self) -> dict:
        if self.kind == "table":
            return {"kind": "table", "w": self.w, "table": dict(sorted(self.table.items()))}
        return {"kind": "parametric", "w": self.w, "a": self.a, "b": self.b, "p": self.p}

    @classmethod
    def from_dict(cls, doc: Mapping) -> HashSpec:
        if doc["kind"] == "table":
            return cls("table", int(doc["w"]), table={str(k): int(v) for k, v in doc["table"].items()})
        return cls("parametric", int(doc["w"]), int(doc["a"]), int(doc["b"]), int(doc["p"]))


def hash_eval(spec: HashSpec, label: str) -> int:
    return spec(label)


def draw_spec(rng: random.Random, w: int) -> HashSpec:
    """One uniform draw from the parametric family with range ``w``."""
    return HashSpec("parametric", w, rng.randrange(1, PRIME), rng.randrange(0, PRIME))


def make_family(seed: int, d: int, ranges: Sequence[int]) -> list[HashSpec]:
    """Draw ``len(ranges)`` independent specs; ``ranges`` has d or 2d entries."""
    if d < 1:
        raise InvalidParameterError(f"d must be at least 1, got {d}")
    if len(ranges) not in (d, 2 * d):
        raise InvalidParameterError(f"expected {d} or {2 * d} ranges, got {len(ranges)}")
    if any(r < 1 for r in ranges):
        raise InvalidParameterError(f"hash ranges must be positive, got {list(ranges)}")
    rng = random.Random(seed)
    return [draw_spec(rng, r) for r in ranges]


def pairwise_deviation(
    w: int,
    trials: int,
    keys: tuple[str, str] = ("x", "y"),
    seed: int = 0,
    draw: Callable[[random.Random, int], HashSpec] = draw_spec,
) -> float:
    """Monte-Carlo check of pairwise independence for one key pair.

    Draws ``trials`` functions from the family and returns the largest
    ``|freq(h(x)=k, h(y)=l) - 1/w**2|`` over all bucket pairs ``(k, l)``.
    """
    if keys[0] == keys[1]:
        raise InvalidParameterError("pairwise independence needs two distinct keys")
    if trials < 10_000:
        raise InvalidParameterError(f"need at least 10^4 trials, got {trials}")
    rng = random.Random(seed)
    counts = [[0] * w for _ in range(w)]
    for _ in range(trials):
        h = draw(rng, w)
        counts[h(keys[0]) - 1][h(keys[1]) - 1] += 1
    target = 1.0 / w**2
    return max(abs(c / trials - target) for row in counts for c in row)
