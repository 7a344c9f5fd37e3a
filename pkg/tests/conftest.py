import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from rlwe_pcp.ring import make_params  # noqa: E402

_criteria = {}


@pytest.fixture(scope="session")
def toy():
    return make_params(4, 17, 1.0)


@pytest.fixture(scope="session")
def p256():
    return make_params(256, 7681, 4.0)


@pytest.fixture(scope="session")
def p256_zkp():
    return make_params(256, 7681, 3.0)


@pytest.fixture
def nprng():
    return np.random.default_rng(20261015)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = report.user_properties and dict(report.user_properties).get("criterion")
    if mark:
        number, title = mark
        prev = _criteria.get(number, (title, True))
        _criteria[number] = (title, prev[1] and report.outcome == "passed")


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
