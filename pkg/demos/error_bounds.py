"""
Sizing from an error target
===========================

Pick epsilon and delta, get d = ceil(ln 1/delta) sketches of width
ceil(e/epsilon), then check how often an edge estimate overshoots by more
than epsilon times the stream weight.
"""

from glava.evaluation import StreamModel, size_for_bounds, validate_bounds

params = size_for_bounds(0.05, 0.05)
print(f"d={params.d} w={params.w}")

result = validate_bounds(0.05, 0.05, StreamModel(n_nodes=500, n_elements=20_000), trials=5)
for report in result.reports:
    print(f"{report.label}: max err {report.max_error:g}, eps*N = {report.threshold:g}")
print("violation rate", result.violation_rate, "underestimates", result.underestimates)

# `python -m glava validate` runs the full 20-trial version and prints PASS or FAIL
