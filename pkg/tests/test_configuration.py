import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from billiards.configuration import (ConfigMeta, Configuration, ConfigurationError,
                                     ConfigurationFormatError, SplitMix64, config_ref,
                                     configuration_to_document, find_scale_factor,
                                     generate_collinear, generate_grid, generate_nested_rings,
                                     generate_random, load_configuration, loads_configuration,
                                     nesting_violations, save_configuration, unit_polygon,
                                     verify_nesting_property)
from billiards.geometry import dot

from conftest import P


def brute_nesting_violations(config):
    """Fraction-arithmetic enumeration of every qualifying ordered triple."""
    rings = config.meta.rings
    bad = []
    for x, y, z in itertools.permutations(range(len(config)), 3):
        if rings[x] > rings[y] and rings[z] >= rings[y]:
            p = config.points
            if not dot(p[x] - p[y], p[z] - p[y]) > 0:
                bad.append((x, y, z))
    return bad


def test_splitmix_reference_values():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_configuration_rejects_duplicates_and_empty():
    with pytest.raises(ConfigurationError, match="duplicate point"):
        Configuration((P(0, 0), P(0, 0)))
    with pytest.raises(ConfigurationError):
        Configuration(())
    with pytest.raises(ConfigurationError):
        Configuration((P(0, 0),), ConfigMeta(rings=(0, 1)))


def test_nested_m1():
    c = generate_nested_rings(1, "1/2")
    assert c.points == (P(1, 0),)
    assert verify_nesting_property(c)


def test_nested_m2_points():
    c = generate_nested_rings(2, Fraction(1, 2))
    assert set(c.points) == {P(1, 0), P(-1, 0), P(Fraction(1, 2), 0), P(Fraction(-1, 2), 0)}
    assert all(p.y == 0 for p in c)


@pytest.mark.parametrize("a", ["1/2", "9/10", "1/1000", "99/100"])
def test_m2_certifies_for_any_scale(a):
    c = generate_nested_rings(2, a)
    assert brute_nesting_violations(c) == []
    assert verify_nesting_property(c)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_nested_structure(m):
    c = generate_nested_rings(m)
    a = Fraction(c.meta.params["a"])
    assert 0 < a < 1
    assert len(c) == m * m
    assert sorted(c.meta.rings) == sorted(j for j in range(m) for _ in range(m))
    base = unit_polygon(m)
    for i, p in enumerate(c.points):
        j = c.meta.rings[i]
        assert p == base[i % m].scaled(a ** j)


@pytest.mark.parametrize("m", [3, 4])
def test_auto_scale_matches_brute_force_certificate(m):
    c = generate_nested_rings(m)
    assert brute_nesting_violations(c) == []
    assert nesting_violations(c) == []


def test_large_scale_is_rejected_with_witnesses():
    # the rings of a 6-gon at ratio 0.9 are far too close together
    c = generate_nested_rings(6, "9/10")
    bad = nesting_violations(c)
    assert bad
    assert set(bad) == set(brute_nesting_violations(c))
    assert not verify_nesting_property(c)


@pytest.mark.parametrize("m", range(1, 8))
def test_certification_survives_halving(m):
    a = find_scale_factor(m)
    assert verify_nesting_property(generate_nested_rings(m, a))
    assert verify_nesting_property(generate_nested_rings(m, a / 2))


def test_missing_ring_metadata():
    with pytest.raises(ConfigurationError):
        nesting_violations(generate_grid(2))


def test_trim_keeps_outer_rings():
    c = generate_nested_rings(3, trim_to=7)
    assert len(c) == 7
    assert c.meta.rings == (0, 0, 0, 1, 1, 1, 2)
    assert verify_nesting_property(c)


def test_random_generator_contracts():
    assert len(generate_random(1, 3)) == 1
    assert generate_random(5, 7) == generate_random(5, 7)
    assert generate_random(5, 7) != generate_random(5, 8)
    c = generate_random(100, 1)
    assert len(set(c.points)) == 100
    for p in c:
        assert 0 <= p.x <= 1000 and 0 <= p.y <= 1000


def test_random_generator_is_reproducible_across_versions():
    # frozen from the documented SplitMix64 stream: top 20 bits per coordinate
    rng = SplitMix64(7)
    u, v = rng.next_u64() >> 44, rng.next_u64() >> 44
    first = generate_random(3, 7).points[0]
    assert first == P(Fraction(1000 * u, 2**20), Fraction(1000 * v, 2**20))


def test_collinear_and_grid():
    assert generate_collinear(3).points == (P(0, 0), P(1, 0), P(2, 0))
    assert generate_collinear(1).points == (P(0, 0),)
    assert set(generate_grid(2).points) == {P(0, 0), P(1, 0), P(0, 1), P(1, 1)}
    assert len(generate_grid(3)) == 9


def test_round_trip_nested(tmp_path):
    c = generate_nested_rings(2, "1/2")
    path = save_configuration(c, tmp_path / "c.json")
    assert load_configuration(path) == c
    c3 = generate_nested_rings(3)
    save_configuration(c3, tmp_path / "c3.json")
    back = load_configuration(tmp_path / "c3.json")
    assert back == c3 and back.meta.rings == c3.meta.rings
    assert config_ref(back) == config_ref(c3)


@settings(max_examples=30)
@given(st.integers(1, 30), st.integers(0, 2**32))
def test_round_trip_random(n, seed):
    c = generate_random(n, seed)
    assert loads_configuration(json.dumps(configuration_to_document(c))) == c


def _doc(points, **meta):
    return json.dumps({"version": 1, "points": points, "meta": meta})


def test_load_exact_rationals():
    c = loads_configuration(_doc([["1/3", "0.5"], ["2", "-7/4"]]))
    assert c.points[0] == P(Fraction(1, 3), Fraction(1, 2))
    assert isinstance(c.points[0].x, Fraction)
    # bare JSON numbers are parsed exactly too
    c = loads_configuration('{"version": 1, "points": [[0.1, 2]], "meta": {}}')
    assert c.points[0].x == Fraction(1, 10)


@pytest.mark.parametrize("text, fragment", [
    (_doc([["0", "0"], ["0", "0"]]), "duplicate point"),
    (_doc([["0", "0"], ["1/0", "1"]]), "points[1][0]"),
    (_doc([["0", "zz"]]), "points[0][1]"),
    (_doc([["0"]]), "points[0]"),
    (_doc([]), "points"),
    ('{"version": 2, "points": [["0", "0"]]}', "version"),
    ('{"version": 1, "points": [["0", "0"]', "malformed JSON"),
    (_doc([["0", "0"]], rings=[0, 1]), "meta.rings"),
])
def test_load_errors(text, fragment):
    with pytest.raises(ConfigurationFormatError) as err:
        loads_configuration(text)
    assert fragment in str(err.value)
