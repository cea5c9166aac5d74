import math
import random

import pytest

from glava.errors import InvalidParameterError, InvalidShapeError, UnsupportedPatternError
from glava.evaluation import (
    CountMinSketch,
    StreamModel,
    compare_shapes,
    gen_stream,
    measure_error,
    planted_positions,
    sample_queries,
    size_for_bounds,
    time_build,
    validate_bounds,
)
from glava.oracle import ExactGraph
from glava.pattern import parse_pattern
from glava.samples import COUNTMIN_PAIR_GROUPS, SAMPLE_EDGES, injective_table
from glava.sketch import GLavaSummary, summary_new
from glava.stream import StreamElement

from conftest import random_stream


@pytest.fixture
def countmin(stream):
    return CountMinSketch.from_pair_groups(COUNTMIN_PAIR_GROUPS).extend(stream)


def test_countmin_groups_cover_the_stream():
    grouped = [pair for group in COUNTMIN_PAIR_GROUPS for pair in group]
    assert sorted(grouped) == sorted(SAMPLE_EDGES)


def test_countmin_example(countmin):
    assert countmin.estimate("a", "b") == 5
    assert countmin.estimate("d", "g") == 1
    assert countmin.aggregate_subgraph([("a", "c"), ("c", "e")]) == 8
    assert countmin.aggregate_subgraph([]) == 0


def test_countmin_rejects_wildcards(countmin):
    with pytest.raises(UnsupportedPatternError):
        countmin.aggregate_subgraph(parse_pattern("a *"))
    assert countmin.aggregate_subgraph(parse_pattern("a c\nc e")) == 8


def test_countmin_never_undershoots():
    rng = random.Random(0)
    stream = random_stream(rng, 40, 2000)
    g = ExactGraph.from_stream(stream)
    cm = CountMinSketch.build(3, 20, seed=1).extend(stream)
    for (a, b), w in g.weights.items():
        assert cm.estimate(a, b) >= w


def test_countmin_from_bounds():
    cm = CountMinSketch.from_bounds(0.05, 0.05)
    assert cm.d == 3 and all(h.w == 55 for h in cm.hashes)


# -- sizing --------------------------------------------------------------------

@pytest.mark.parametrize("eps, delta, d, w", [(0.1, 0.05, 3, 28), (0.05, 0.05, 3, 55), (0.01, 0.001, 7, 272)])
def test_size_for_bounds(eps, delta, d, w):
    p = size_for_bounds(eps, delta)
    assert (p.d, p.w) == (d, w)
    assert p.d == math.ceil(math.log(1 / delta)) and p.w == math.ceil(math.e / eps)


@pytest.mark.parametrize("eps, delta", [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1)])
def test_size_for_bounds_rejects(eps, delta):
    with pytest.raises(InvalidParameterError):
        size_for_bounds(eps, delta)


# -- generators ----------------------------------------------------------------

def test_gen_stream_is_deterministic():
    m = StreamModel(n_nodes=50, n_elements=500, seed=3)
    a, b = gen_stream(m), gen_stream(m)
    assert a == b and len(a) == 500
    assert gen_stream(m.replace(seed=4)) != a
    assert {e.src for e in a} <= set(m.labels())


def test_gen_stream_zipf_is_skewed():
    stream = gen_stream(StreamModel(n_nodes=200, n_elements=20_000, exponent=1.5))
    counts = {}
    for e in stream:
        counts[e.src] = counts.get(e.src, 0) + 1
    assert counts["n0"] > 10 * counts.get("n100", 1)


def test_planted_edges_appear():
    planted = (("p", "q"), ("q", "r"))
    m = StreamModel(kind="planted", n_nodes=20, n_elements=100, planted=planted)
    stream = gen_stream(m)
    positions = planted_positions(m)
    assert [(stream[i].src, stream[i].dst) for i in positions] == list(planted)


def test_weighted_stream():
    stream = gen_stream(StreamModel(kind="uniform", n_nodes=5, n_elements=300, max_weight=4))
    assert {e.weight for e in stream} == {1.0, 2.0, 3.0, 4.0}


@pytest.mark.parametrize(
    "changes",
    [{"exponent": 0}, {"kind": "gauss"}, {"n_nodes": 0}, {"n_elements": -1}, {"max_weight": 0},
     {"kind": "planted", "n_elements": 1, "planted": (("a", "b"), ("b", "c"))}],
)
def test_model_rejects(changes):
    with pytest.raises(InvalidParameterError):
        StreamModel(**changes)


def test_sample_queries_mix():
    g = ExactGraph.from_stream(gen_stream(StreamModel(n_nodes=100, n_elements=1000)))
    qs = sample_queries(g, 100, seed=2)
    assert len(qs) == 100
    assert all(g.edge(*q) > 0 for q in qs[::2])
    assert qs == sample_queries(g, 100, seed=2)


# -- error measurement -------------------------------------------------------------

def test_measure_error_injective_is_exact():
    stream = gen_stream(StreamModel(n_nodes=60, n_elements=2000, seed=1))
    g = ExactGraph.from_stream(stream)
    s = GLavaSummary.from_tables([injective_table(g.nodes)]).extend(stream)
    report = measure_error(s, g, sample_queries(g, 200), 0.05)
    assert report.max_error == 0 and report.violation_rate == 0 and report.underestimates == 0


def test_measure_error_single_cell_sketch():
    # one bucket collects everything, so every estimate is N
    stream = gen_stream(StreamModel(n_nodes=30, n_elements=400, seed=5))
    g = ExactGraph.from_stream(stream)
    s = summary_new(1, 1, seed=0).extend(stream)
    qs = sample_queries(g, 50)
    report = measure_error(s, g, qs, 0.5)
    assert report.errors == [g.total_weight - g.edge(a, b) for a, b in qs]
    assert report.threshold == 0.5 * g.total_weight
    assert report.to_dict()["queries"] == 50 and len(report.records()) == 50


def test_measure_error_accepts_callables_and_countmin():
    g = ExactGraph.from_stream([StreamElement("a", "b", 2)])
    assert measure_error(lambda a, b: 7.0, g, [("a", "b")], 0.1).errors == [5.0]
    cm = CountMinSketch.build(1, 4).extend([StreamElement("a", "b", 2)])
    assert measure_error(cm, g, [("a", "b")], 0.1).max_error == 0
    with pytest.raises(InvalidParameterError):
        measure_error(3, g, [("a", "b")], 0.1)


def test_validate_bounds_small():
    res = validate_bounds(0.1, 0.1, StreamModel(n_nodes=100, n_elements=2000), trials=3, queries=50)
    assert res.queries == 150
    assert res.underestimates == 0
    assert res.violation_rate <= 0.1 and res.passed


def test_validate_bounds_injective():
    res = validate_bounds(0.1, 0.1, StreamModel(n_nodes=50, n_elements=500), trials=2, queries=40,
                          injective=True)
    assert res.violation_rate == 0 and res.node_violation_rate == 0


def test_validate_bounds_rejects():
    with pytest.raises(InvalidParameterError):
        validate_bounds(trials=0)
    with pytest.raises(InvalidParameterError):
        validate_bounds(queries=0)


def test_compare_shapes():
    model = StreamModel(n_nodes=200, n_elements=3000)
    cmp = compare_shapes(1024, ["square", "mixed", "128x8,8x128,32x32"], model, queries=100)
    assert set(cmp.reports) == {"square", "mixed", "128x8,8x128,32x32"}
    assert all(r.underestimates == 0 for r in cmp.reports.values())
    assert "mixed" in cmp.table()
    with pytest.raises(InvalidParameterError):
        compare_shapes(1024, [], model)
    with pytest.raises(InvalidShapeError):
        compare_shapes(1000, ["mixed"], model)


def test_time_build_positive():
    stream = gen_stream(StreamModel(n_nodes=20, n_elements=200))
    assert time_build(stream, repeats=2, d=2, cell_budget=64) > 0
