import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from billiards.geometry import (COS_TOLERANCE, AnglePolicy, DegenerateSegmentError, Point,
                                RationalRotation, coordinates_distinct, dot, rotate_configuration,
                                squared_distance, turn_admissible)

from conftest import P, points, rotation_params

RIGHT = AnglePolicy.right_angle()


@pytest.mark.parametrize("prev, cur, nxt, expected", [
    ((0, 0), (1, 0), (2, 0), True),
    ((0, 0), (1, 0), (1, 1), False),
    ((0, 0), (1, 0), (2, Fraction(1, 2)), True),
    ((0, 0), (1, 0), (0, 1), False),
])
def test_turn_examples(prev, cur, nxt, expected):
    assert turn_admissible(P(*prev), P(*cur), P(*nxt), RIGHT) is expected


def test_doubling_back_is_not_admissible():
    assert not turn_admissible(P(0, 0), P(1, 0), P(0, 0), RIGHT)
    assert not turn_admissible(P(0, 0), P(1, 0), P(0, 0), AnglePolicy.from_degrees(0))


def test_degenerate_segment_raises():
    with pytest.raises(DegenerateSegmentError, match="degenerate segment"):
        turn_admissible(P(1, 1), P(1, 1), P(2, 0))
    with pytest.raises(DegenerateSegmentError):
        turn_admissible(P(0, 0), P(1, 1), P(1, 1))


def test_policy_construction():
    assert AnglePolicy.from_degrees(90).exact
    assert not AnglePolicy.from_degrees(60).exact
    assert AnglePolicy.from_degrees(60).label == "60"
    assert AnglePolicy.from_degrees(37.5).label == "37.5"
    with pytest.raises(ValueError):
        AnglePolicy.general(math.pi)
    with pytest.raises(ValueError):
        AnglePolicy(alpha=1.0, exact=True)


def test_general_policy_boundary_is_conservative():
    # exactly 120 degrees between the two segments
    prev, cur = P(1, 0), P(0, 0)
    nxt = Point(Fraction(-1, 2), Fraction(math.sqrt(3) / 2))
    assert not turn_admissible(prev, cur, nxt, AnglePolicy.from_degrees(120))
    assert turn_admissible(prev, cur, nxt, AnglePolicy.from_degrees(119))


@pytest.mark.parametrize("t, p, image", [
    (0, (3, 4), (3, 4)),
    (1, (1, 0), (0, 1)),
    (1, (0, 1), (-1, 0)),
])
def test_rotation_examples(t, p, image):
    assert RationalRotation(t).apply(P(*p)) == P(*image)


@given(rotation_params)
def test_rotation_is_an_isometry(t):
    a, b = rotate_configuration([P(0, 0), P(3, 4)], RationalRotation(t))
    assert squared_distance(a, b) == 25
    assert RationalRotation(t).cos ** 2 + RationalRotation(t).sin ** 2 == 1


def test_coordinates_distinct_examples():
    assert coordinates_distinct([P(0, 0), P(1, 2), P(2, 1)])
    assert not coordinates_distinct([P(0, 0), P(0, 1)])
    assert coordinates_distinct([])


@given(points, points, points)
def test_symmetry(a, b, c):
    assume(a != b and c != b)
    for policy in (RIGHT, AnglePolicy.from_degrees(45), AnglePolicy.from_degrees(135)):
        assert turn_admissible(a, b, c, policy) == turn_admissible(c, b, a, policy)


@given(points, points, points, rotation_params, points,
       st.fractions(min_value=Fraction(1, 50), max_value=100, max_denominator=50))
def test_exact_policy_similarity_invariance(a, b, c, t, shift, scale):
    assume(a != b and c != b)
    rot = RationalRotation(t)
    moved = [rot.apply(p).scaled(scale) + shift for p in (a, b, c)]
    assert turn_admissible(*moved) == turn_admissible(a, b, c)


@given(points, points, points)
@settings(max_examples=300)
def test_general_right_angle_agrees_off_the_boundary(a, b, c):
    assume(a != b and c != b)
    u, v = a - b, c - b
    norm = math.sqrt(float(dot(u, u)) * float(dot(v, v)))
    assume(abs(float(dot(u, v))) > 10 * COS_TOLERANCE * norm)
    general = AnglePolicy.general(math.pi / 2)
    assert turn_admissible(a, b, c, general) == turn_admissible(a, b, c, RIGHT)


@given(points, points, points, st.sampled_from([0, 30, 60, 90, 120, 150, 179]),
       st.sampled_from([0, 30, 60, 90, 120, 150, 179]))
def test_policies_are_nested(a, b, c, lo, hi):
    assume(a != b and c != b and lo <= hi)
    if turn_admissible(a, b, c, AnglePolicy.from_degrees(hi)):
        assert turn_admissible(a, b, c, AnglePolicy.from_degrees(lo))
