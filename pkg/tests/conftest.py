import random
import time

import pytest
from hypothesis import HealthCheck, settings

from orbitstar.lie import catalog

settings.register_profile("orbitstar", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("orbitstar")


@pytest.fixture(scope="session")
def su2():
    return catalog("su2")


@pytest.fixture(scope="session")
def heis():
    return catalog("heisenberg")


@pytest.fixture(scope="session")
def su3():
    return catalog("su3")


@pytest.fixture
def rng():
    return random.Random(1234)


# ---- acceptance reporting ------------------------------------------------------------

SESSION_START = time.perf_counter()
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(session, config, items):
    # acceptance runs last so the runtime criterion sees (almost) the whole suite
    items.sort(key=lambda it: it.get_closest_marker("criterion") is not None)


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    ok = call.excinfo is None
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}  {'PASS' if ok else 'FAIL'}  {title}")
