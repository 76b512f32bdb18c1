import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from billiards.configuration import (Configuration, generate_collinear, generate_grid,
                                     generate_nested_rings, generate_random)
from billiards.geometry import AnglePolicy, Point, RationalRotation, dot, turn_admissible
from billiards.solver import (Budget, SolverError, Status, Trajectory, beam_longest,
                              brute_force_longest, build_transition_graph, exact_longest, solve,
                              validate_trajectory)

from conftest import P


def count_admissible_triples(config):
    pts = config.points
    return sum(dot(pts[a] - pts[b], pts[c] - pts[b]) < 0
               for a, b, c in itertools.permutations(range(len(pts)), 3))


def test_validate_examples():
    line = generate_collinear(3)
    assert validate_trajectory(line, [0, 1, 2])
    square = generate_grid(2)  # (0,0) (1,0) (0,1) (1,1)
    result = validate_trajectory(square, [0, 1, 3])
    assert not result
    assert result.violation.position == 2 and result.violation.reason == "bad angle"
    assert validate_trajectory(square, [2])
    assert validate_trajectory(square, [3, 0])
    dup = validate_trajectory(line, [0, 1, 0])
    assert dup.violation.reason == "duplicate" and dup.violation.position == 3
    with pytest.raises(IndexError):
        validate_trajectory(line, [0, 3])


def test_trajectory_type():
    assert Trajectory([2, 0, 1]).reversed().indices == (1, 0, 2)
    with pytest.raises(SolverError):
        Trajectory([1, 1])
    with pytest.raises(SolverError):
        Trajectory([])


def test_transition_graph_examples():
    square = generate_grid(2)
    assert count_admissible_triples(square) == 0
    g = build_transition_graph(square)
    assert all(not row for row in g.succ)
    line = generate_collinear(5)
    g = build_transition_graph(line)
    for i, j in itertools.permutations(range(5), 2):
        beyond = [k for k in range(5) if (k - j) * (j - i) > 0]
        assert g.successors(i, j) == beyond
    g = build_transition_graph(generate_collinear(2))
    assert g.successors(0, 1) == [] and g.successors(1, 0) == []


@given(st.integers(2, 9), st.integers(0, 10**6), st.sampled_from([90, 45, 120]))
@settings(max_examples=40, deadline=None)
def test_transition_graph_matches_predicate_and_reversal(n, seed, alpha):
    c = generate_random(n, seed)
    policy = AnglePolicy.from_degrees(alpha)
    g = build_transition_graph(c, policy)
    pts = c.points
    for i, j in itertools.permutations(range(n), 2):
        expected = [k for k in range(n) if k not in (i, j)
                    and turn_admissible(pts[i], pts[j], pts[k], policy)]
        assert g.successors(i, j) == expected
        for k in expected:
            assert i in g.successors(k, j)


@pytest.mark.parametrize("config, expected", [
    (generate_grid(2), 2),
    (generate_collinear(5), 5),
    (Configuration((P(3, 1),)), 1),
    (Configuration((P(3, 1), P(0, 0))), 2),
])
def test_brute_force_examples(config, expected):
    report = brute_force_longest(config)
    assert report.best_length == expected
    assert report.status is Status.PROVED_OPTIMAL


def test_brute_force_guard():
    with pytest.raises(SolverError, match="oracle limit"):
        brute_force_longest(generate_collinear(11))


@pytest.mark.parametrize("config, expected", [
    (generate_grid(2), 2),
    (generate_collinear(10), 10),
    (Configuration((P(0, 0),)), 1),
    (Configuration((P(0, 0), P(1, 1))), 2),
])
def test_exact_examples(config, expected):
    report = exact_longest(config)
    assert report.status is Status.PROVED_OPTIMAL
    assert report.best_length == expected


def test_exact_on_nested_m3_matches_brute_force():
    c = generate_nested_rings(3)
    exact = exact_longest(c)
    brute = brute_force_longest(c)
    assert exact.status is Status.PROVED_OPTIMAL
    assert exact.best_length == brute.best_length
    assert 3 <= exact.best_length <= 9


@given(st.integers(1, 8), st.integers(0, 10**6), st.sampled_from([0, 60, 90, 135]))
@settings(max_examples=60, deadline=None)
def test_oracle_equivalence_and_tiebreak(n, seed, alpha):
    c = generate_random(n, seed)
    policy = AnglePolicy.from_degrees(alpha)
    exact = exact_longest(c, policy)
    brute = brute_force_longest(c, policy)
    assert exact.best_length == brute.best_length
    # both resolve ties to the lexicographically smallest index sequence
    assert exact.best_indices == brute.best_indices
    for report in (exact, brute):
        assert validate_trajectory(c, report.best_indices, policy)
        assert validate_trajectory(c, report.best_indices[::-1], policy)
        assert 1 <= report.best_length <= n


def test_parallel_matches_serial():
    for c in (generate_nested_rings(4), generate_random(9, 3)):
        serial = exact_longest(c)
        parallel = exact_longest(c, jobs=2)
        assert parallel.status == serial.status == Status.PROVED_OPTIMAL
        assert parallel.best_indices == serial.best_indices


def test_budget_exhaustion_returns_valid_lower_bound():
    c = generate_nested_rings(5)
    report = exact_longest(c, budget=Budget(nodes=50))
    assert report.status is Status.BUDGET_EXHAUSTED
    assert validate_trajectory(c, report.best_indices)
    assert report.best_length >= 2


def test_budget_and_size_errors():
    with pytest.raises(SolverError):
        Budget(nodes=0)
    with pytest.raises(SolverError):
        Budget(time_ms=-5)
    big = Configuration(tuple(P(i, i * i) for i in range(65)))
    with pytest.raises(SolverError):
        exact_longest(big)
    assert solve(big, "exact").mode == "beam"
    with pytest.raises(SolverError):
        beam_longest(generate_collinear(3), beam_width=0)


def test_beam_basics():
    assert beam_longest(Configuration((P(0, 0), P(5, 2)))).best_length == 2
    c = generate_random(12, 4)
    a = beam_longest(c, beam_width=8, restarts=3, seed=11)
    b = beam_longest(c, beam_width=8, restarts=3, seed=11)
    assert a.best_indices == b.best_indices and a.nodes_expanded == b.nodes_expanded
    assert a.status is Status.BUDGET_EXHAUSTED
    assert validate_trajectory(c, a.best_indices)
    assert beam_longest(generate_collinear(10)).best_length == 10


def test_beam_agrees_with_brute_force_mostly():
    hits = 0
    for seed in range(100):
        n = 4 + seed % 5
        c = generate_random(n, 5000 + seed)
        hits += beam_longest(c, beam_width=n * n, seed=seed).best_length == \
            brute_force_longest(c).best_length
    assert hits >= 90


def test_report_document():
    c = generate_grid(2)
    doc = exact_longest(c, budget=Budget(nodes=1000)).to_document(c)
    assert doc["mode"] == "exact" and doc["policy_alpha_degrees"] == "90"
    assert doc["best_length"] == 2 and doc["status"] == "PROVED_OPTIMAL"
    assert doc["budget"] == {"nodes": 1000, "time_ms": None}
    assert doc["config_ref"].startswith("sha256:")
    assert set(doc) == {"config_ref", "mode", "policy_alpha_degrees", "status", "best_length",
                        "best_indices", "nodes_expanded", "wall_ms", "budget"}


def test_reachability_bound_gives_same_optimum():
    for c in (generate_nested_rings(4), generate_random(10, 2)):
        assert exact_longest(c, reachability=True).best_indices == exact_longest(c).best_indices


def test_similarity_invariance_example():
    c = generate_random(7, 21)
    rot = RationalRotation(Fraction(2, 7))
    moved = Configuration(tuple(rot.apply(p).scaled(Fraction(3, 2)) + Point(Fraction(-4), Fraction(9, 5))
                                for p in c))
    assert exact_longest(moved).best_length == exact_longest(c).best_length
