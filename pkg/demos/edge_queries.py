"""
Edge queries on a hashed adjacency matrix
=========================================

Fourteen edges over seven nodes, squeezed into a 4x4 matrix by a hand-picked
hash, then into two such matrices with different hashes.
"""

from glava import GLavaSummary, estimate_edge
from glava.samples import PAIR_FIRST, PAIR_SECOND, SINGLE_SKETCH, sample_stream

stream = sample_stream()

# a->I, b->II, c->III, d->IV, e->I, f->II, g->III
single = GLavaSummary.from_tables([SINGLE_SKETCH]).extend(stream)
print(single.sketches[0].cells)

# (b, c) sits alone in cell (II, III); (g, b) shares cell (III, II) with (c, f)
print("b->c", estimate_edge(single, "b", "c").value)
print("g->b", estimate_edge(single, "g", "b").value)

# a second, independently hashed sketch breaks the collision
pair = GLavaSummary.from_tables([PAIR_FIRST, PAIR_SECOND]).extend(stream)
est = estimate_edge(pair, "g", "b")
print("g->b with two sketches", est.value, "per sketch", est.per_sketch)

# deletions are subtractions; the summary forgets the edge completely
for e in stream:
    pair.delete(e)
print("all zero after deleting everything:", all(not s.cells.any() for s in pair.sketches))
