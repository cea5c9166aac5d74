"""
Reachability and subgraph patterns
==================================

Reachability is answered by searching each sketch's own small graph. Patterns
are matched against sketch nodes, so a collision can only add matches when
every label in the pattern is fixed.
"""

from glava import ExactGraph, GLavaSummary, estimate_reach, estimate_subgraph, estimate_subgraph_fast
from glava.pattern import SubgraphQuery, parse_pattern
from glava.samples import PAIR_FIRST, PAIR_SECOND, injective_table, sample_stream

stream = sample_stream()
exact = ExactGraph.from_stream(stream)
pair = GLavaSummary.from_tables([PAIR_FIRST, PAIR_SECOND]).extend(stream)

print("a reaches g:", estimate_reach(pair, "a", "g").value, "(exact", exact.reach("a", "g"), ")")

q = SubgraphQuery.of([("a", "b"), ("a", "c")])
print("full", estimate_subgraph(pair, q).value,
      "per-edge", estimate_subgraph_fast(pair, q).value,
      "exact", exact.subgraph(q))

# with one bucket per label the sketch is the graph, so counts are exact
lossless = GLavaSummary.from_tables([injective_table("abcdefg")]).extend(stream)
triangles = parse_pattern("*1 b\nb c\nc *1", mode="count_matches")
print("triangles through b->c:", estimate_subgraph(lossless, triangles).value, exact.subgraph(triangles))
