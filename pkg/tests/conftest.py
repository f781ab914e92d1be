import random

import pytest
from hypothesis import HealthCheck, settings

from fibertree.randomgen import TreeConfig, h_tree, random_tree, star_tree

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def star3():
    # center c with leaves a, b, d on unit edges
    from fibertree import GeometricTree

    return GeometricTree(["c", "a", "b", "d"], [("c", "a", 1), ("c", "b", 1), ("c", "d", 1)])


@pytest.fixture
def htree():
    return h_tree()


@pytest.fixture
def rng():
    return random.Random(12345)


def branching_trees(seed=7, count=3, n_vertices=8):
    r = random.Random(seed)
    return [star_tree(3), h_tree()] + [
        random_tree(r, TreeConfig(n_vertices=n_vertices, require_branch=True)) for _ in range(count)
    ]


# -- acceptance report -------------------------------------------------------

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    status = "PASS" if rep.passed else "FAIL"
    if _criteria.get(n, ("PASS",))[0] == "PASS":
        _criteria[n] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")
