from fractions import Fraction

import pytest
from hypothesis import strategies as st

from billiards.geometry import Point

small_rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)
points = st.builds(Point, small_rationals, small_rationals)
rotation_params = st.fractions(min_value=-10, max_value=10, max_denominator=30)


def P(x, y):
    return Point(Fraction(x), Fraction(y))


@pytest.fixture
def square_points():
    return [P(0, 0), P(1, 0), P(1, 1), P(0, 1)]


ACCEPTANCE_LINES: list[str] = []


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
