import numpy as np
import pytest

from symspace.lts import LtsStructure
from symspace.models import space_from_selector


@pytest.fixture
def ex5_lts():
    return space_from_selector("ex5").lts()


@pytest.fixture
def ex6_lts():
    return space_from_selector("ex6").lts()


@pytest.fixture
def sphere_lts():
    return space_from_selector("sphere:2").lts()


@pytest.fixture
def hyperbolic_lts():
    return space_from_selector("hyperbolic").lts()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def abelian(n):
    return LtsStructure.zero(n)


# -- acceptance summary: one pass/fail line per criterion --------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): an acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            item.user_properties.append(("acceptance", marker.args))


def pytest_runtest_logreport(report):
    marker = dict(report.user_properties).get("acceptance")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "passed": True, "seconds": 0.0})
    entry["passed"] &= report.passed
    entry["seconds"] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        flag = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {flag}  {e['title']} ({e['seconds']:.2f} s)")
