import sys
from fractions import Fraction

import pytest

from tilinglab.exactnum import NumberField
from tilinglab.subst import find_seed, grow, load_catalog


@pytest.fixture(scope="session")
def QQ():
    return NumberField.rationals()


@pytest.fixture(scope="session")
def Qtau():
    return NumberField([-1, -1, 1], [Fraction(1), Fraction(2)])


@pytest.fixture(scope="session")
def Qsqrt5():
    return NumberField([-5, 0, 1], [Fraction(2), Fraction(3)])


@pytest.fixture(scope="session")
def Qcbrt2():
    return NumberField([-2, 0, 0, 1], [Fraction(1), Fraction(2)])


_APPROX = {}


def approximant(name, level, interior=False):
    key = (name, level, interior)
    if key not in _APPROX:
        rule = load_catalog(name)
        _APPROX[key] = grow(rule, find_seed(rule, interior=interior), level)
    return _APPROX[key]


@pytest.fixture(scope="session")
def approx():
    return approximant


def pytest_terminal_summary(terminalreporter):
    runs = sys.modules.get("acceptance_runs")
    if runs is not None and runs.REPORT:
        terminalreporter.section("acceptance criteria")
        for n in sorted(runs.REPORT):
            terminalreporter.write_line(runs.REPORT[n])
