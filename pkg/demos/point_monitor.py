"""
Watching a node's incoming flow
===============================

A monitor looks at each element before it is folded into the summary and
raises an alarm when the node's estimated in-flow would cross a threshold.
Collisions only ever push the estimate up, so an alarm may come early but
never late.
"""

import numpy as np

from glava import ExactGraph, PointMonitor, StreamElement, summary_new

rng = np.random.default_rng(3)
summary = summary_new(d=3, cell_budget=256 * 256, seed=3)
monitor = PointMonitor(summary, node="srv", direction="in", threshold=500.0)
exact = ExactGraph()

# background chatter, then a burst towards srv
hosts = [f"h{i}" for i in range(200)]
stream = [StreamElement(rng.choice(hosts), rng.choice(hosts), float(rng.integers(1, 20))) for _ in range(5000)]
stream += [StreamElement(rng.choice(hosts), "srv", 40.0) for _ in range(30)]

for e in stream:
    alarm = monitor.observe(e)
    exact.apply(e)
    if alarm:
        print(f"element {alarm.ordinal}: estimate {alarm.estimate:g} + {e.weight:g} > {alarm.threshold:g}")
        print(f"exact in-flow after this element: {exact.flow('srv', 'in'):g}")
        break

# the same thing from a shell:
#   python -m glava monitor --node srv --threshold 500 --cell-budget 65536 < packets.txt
