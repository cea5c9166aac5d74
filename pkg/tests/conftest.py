import random

import pytest

from glava.oracle import ExactGraph
from glava.samples import PAIR_FIRST, PAIR_SECOND, SINGLE_SKETCH, sample_stream
from glava.sketch import GLavaSummary
from glava.stream import StreamElement


@pytest.fixture
def stream():
    return sample_stream()


@pytest.fixture
def oracle(stream):
    return ExactGraph.from_stream(stream)


@pytest.fixture
def single(stream):
    return GLavaSummary.from_tables([SINGLE_SKETCH], companions=True).extend(stream)


@pytest.fixture
def pair(stream):
    return GLavaSummary.from_tables([PAIR_FIRST, PAIR_SECOND], companions=True).extend(stream)


def random_stream(rng: random.Random, n_labels: int, n_elements: int, max_weight: int = 5):
    labels = [f"v{i}" for i in range(n_labels)]
    return [
        StreamElement(rng.choice(labels), rng.choice(labels), float(rng.randint(0, max_weight)))
        for _ in range(n_elements)
    ]


# -- acceptance report -------------------------------------------------------

_acceptance: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        doc = getattr(report, "criterion", "") or ""
        _acceptance.append((name, report.outcome.upper(), doc))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    doc = (item.obj.__doc__ or "").strip().splitlines()
    rep.criterion = doc[0] if doc else ""


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, doc in _acceptance:
        terminalreporter.write_line(f"{outcome:<7} {doc or name}")
