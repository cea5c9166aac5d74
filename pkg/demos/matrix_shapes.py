"""
Square versus non-square sketches
=================================

For a fixed number of cells, rows and columns can be split unevenly. A
7x2 layout of the sample graph, then a comparison of schedules on a skewed
synthetic stream.
"""

from glava.evaluation import StreamModel, compare_shapes
from glava.samples import NONSQUARE_COLS, NONSQUARE_ROWS, sample_stream
from glava.sketch import GraphSketch

ns = GraphSketch((7, 2), NONSQUARE_ROWS, NONSQUARE_COLS)
for e in sample_stream():
    ns.update(e)
print(ns.cells)

model = StreamModel(n_nodes=500, n_elements=20_000, exponent=1.1)
cmp = compare_shapes(1024, ["square", "mixed", "128x8,8x128,32x32"], model, queries=400)
print(cmp.table())
