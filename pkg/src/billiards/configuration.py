"""Point-set containers, generators and the configuration file format.

The adversarial generator builds ``m`` concentric regular ``m``-gons with
radii ``1, a, a^2, ..., a^(m-1)`` and certifies the nesting property
(every turn at a ring vertex that arrives from a strictly inner ring and
leaves towards the same or an inner ring is acute) exactly on the stored
coordinates.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from math import lcm
from pathlib import Path
from typing import Iterator, Optional, Sequence

from ._io import atomic_write_text, dump_json
from .geometry import Point, to_scalar

FORMAT_VERSION = 1

#: Regular polygon vertices are snapped to dyadic rationals with this denominator.
SNAP_DENOMINATOR = 2**48

#: Scale-factor search gives up below this value.
MIN_SCALE = Fraction(1, 2**64)

#: Bisection steps spent refining the scale factor after the halving phase.
BISECTION_STEPS = 6

#: Random coordinates are drawn on a grid with this many cells per axis.
RANDOM_RESOLUTION = 2**20

AUTO = "auto"


class ConfigurationError(ValueError):
    pass


class ConfigurationFormatError(ConfigurationError):
    pass


class ScaleFactorError(RuntimeError):
    pass


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood 2014).

    Chosen because it is a few lines of integer arithmetic, so the same seed
    reproduces the same point sets in any language.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``; ``bound`` must be a power of two."""
        assert bound > 0 and bound & (bound - 1) == 0
        return self.next_u64() >> (64 - bound.bit_length() + 1) if bound > 1 else 0


@dataclass(frozen=True)
class ConfigMeta:
    generator: str = "manual"
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None
    rings: Optional[tuple[int, ...]] = None

    def to_dict(self) -> dict:
        doc = {"generator": self.generator, "params": dict(self.params), "seed": self.seed}
        if self.rings is not None:
            doc["rings"] = list(self.rings)
        return doc


@dataclass(frozen=True)
class Configuration:
    """A finite set of distinct points with provenance metadata."""

    points: tuple[Point, ...]
    meta: ConfigMeta = field(default_factory=ConfigMeta)

    def __post_init__(self):
        pts = tuple(Point(to_scalar(p[0]), to_scalar(p[1])) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ConfigurationError("a configuration needs at least one point")
        seen: dict[Point, int] = {}
        for i, p in enumerate(pts):
            if p in seen:
                raise ConfigurationError(
                    f"duplicate point: points[{i}] equals points[{seen[p]}] ({p.x}, {p.y})")
            seen[p] = i
        rings = self.meta.rings
        if rings is not None and len(rings) != len(pts):
            raise ConfigurationError(
                f"ring metadata has {len(rings)} entries for {len(pts)} points")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    @property
    def n(self) -> int:
        return len(self.points)

    def with_points(self, points: Sequence[Point], generator: Optional[str] = None) -> "Configuration":
        meta = self.meta if generator is None else ConfigMeta(generator, dict(self.meta.params),
                                                            self.meta.seed, self.meta.rings)
        return Configuration(tuple(points), meta)


# --- generators -----------------------------------------------------------

def generate_collinear(n: int) -> Configuration:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Configuration(tuple(Point(Fraction(i), Fraction(0)) for i in range(n)),
                         ConfigMeta("collinear", {"n": n}))


def generate_grid(k: int) -> Configuration:
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = tuple(Point(Fraction(i), Fraction(j)) for j in range(k) for i in range(k))
    return Configuration(pts, ConfigMeta("grid", {"k": k}))


def unit_square() -> Configuration:
    return generate_grid(2)


def generate_random(n: int, seed: int, box: Sequence = (0, 0, 1000, 1000)) -> Configuration:
    """``n`` distinct points drawn from a SplitMix64 stream.

    Each coordinate is ``lo + (hi - lo) * u / 2^20`` with ``u`` the top 20
    bits of the next 64-bit output (x first, then y). Duplicates are redrawn.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x0, y0, x1, y1 = (to_scalar(v) for v in box)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("bounding box must have positive extents")
    if n > (RANDOM_RESOLUTION) ** 2:
        raise ValueError("too many points for the sampling grid")
    rng = SplitMix64(seed)
    pts: list[Point] = []
    seen: set[Point] = set()
    while len(pts) < n:
        u = rng.below(RANDOM_RESOLUTION)
        v = rng.below(RANDOM_RESOLUTION)
        p = Point(x0 + (x1 - x0) * Fraction(u, RANDOM_RESOLUTION),
                  y0 + (y1 - y0) * Fraction(v, RANDOM_RESOLUTION))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    params = {"n": n, "box": [str(x0), str(y0), str(x1), str(y1)]}
    return Configuration(tuple(pts), ConfigMeta("random", params, seed))


@lru_cache(maxsize=None)
def unit_polygon(m: int) -> tuple[Point, ...]:
    """Vertices of the regular m-gon on the unit circle, snapped to dyadics."""
    out = []
    for k in range(m):
        theta = 2 * math.pi * k / m
        out.append(Point(Fraction(round(math.cos(theta) * SNAP_DENOMINATOR), SNAP_DENOMINATOR),
                         Fraction(round(math.sin(theta) * SNAP_DENOMINATOR), SNAP_DENOMINATOR)))
    return tuple(out)


def _ring_points(m: int, a: Fraction) -> tuple[list[Point], list[int]]:
    base = unit_polygon(m)
    pts, rings = [], []
    radius = Fraction(1)
    for j in range(m):
        pts.extend(v.scaled(radius) for v in base)
        rings.extend([j] * m)
        radius *= a
    return pts, rings


def generate_nested_rings(m: int, a=AUTO, trim_to: Optional[int] = None) -> Configuration:
    """Union of K(m, a^j) for j = 0..m-1; ``a=AUTO`` picks a certified scale.

    Points are listed ring by ring, outermost first. ``trim_to`` keeps only
    the first ``trim_to`` points, i.e. drops vertices from the innermost rings.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if a is None or (isinstance(a, str) and a.lower() == AUTO):
        a = find_scale_factor(m)
    else:
        a = to_scalar(a)
        if not 0 < a < 1:
            raise ValueError("scale factor must lie in (0, 1)")
    pts, rings = _ring_points(m, a)
    params = {"m": m, "a": str(a)}
    if trim_to is not None:
        if not 1 <= trim_to <= m * m:
            raise ValueError(f"trim_to must be in [1, {m * m}]")
        pts, rings = pts[:trim_to], rings[:trim_to]
        params["trim_to"] = trim_to
    return Configuration(tuple(pts), ConfigMeta("nested", params, None, tuple(rings)))


def nesting_violations(config: Configuration, limit: Optional[int] = None) -> list[tuple[int, int, int]]:
    """All triples (x, y, z) breaking the nesting property, as point indices.

    A triple qualifies when x lies on a strictly inner ring relative to y and
    z lies on y's ring or further in; it violates the property unless
    dot(x - y, z - y) > 0. Checked in exact integer arithmetic.
    """
    rings = config.meta.rings
    if rings is None:
        raise ConfigurationError("configuration has no ring metadata")
    pts = config.points
    denom = lcm(*(p.x.denominator for p in pts), *(p.y.denominator for p in pts))
    ipts = [(int(p.x * denom), int(p.y * denom)) for p in pts]
    n = len(pts)
    bad: list[tuple[int, int, int]] = []
    for yi in range(n):
        ry = rings[yi]
        py, qy = ipts[yi]
        inner = [(xi, ipts[xi][0] - py, ipts[xi][1] - qy) for xi in range(n) if rings[xi] > ry]
        if not inner:
            continue
        outs = [(zi, ipts[zi][0] - py, ipts[zi][1] - qy)
                for zi in range(n) if zi != yi and rings[zi] >= ry]
        for xi, ux, uy in inner:
            for zi, vx, vy in outs:
                if zi != xi and ux * vx + uy * vy <= 0:
                    bad.append((xi, yi, zi))
                    if limit is not None and len(bad) >= limit:
                        return bad
    return bad


def verify_nesting_property(config: Configuration) -> bool:
    return not nesting_violations(config, limit=1)


def _certified(m: int, a: Fraction) -> bool:
    pts, rings = _ring_points(m, a)
    config = Configuration(tuple(pts), ConfigMeta("nested", {"m": m}, None, tuple(rings)))
    return verify_nesting_property(config)


@lru_cache(maxsize=None)
def find_scale_factor(m: int) -> Fraction:
    """Certified scale factor for ``m`` nested rings.

    Halves from 1/2 until the exact check passes, bisects a few steps towards
    the last failure (or 1), and returns half the largest certified value.
    The returned value is itself re-certified.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    hi = Fraction(1)
    lo = Fraction(1, 2)
    while not _certified(m, lo):
        hi = lo
        lo /= 2
        if lo < MIN_SCALE:
            raise ScaleFactorError("no admissible scale factor found")
    for _ in range(BISECTION_STEPS):
        mid = (lo + hi) / 2
        if _certified(m, mid):
            lo = mid
        else:
            hi = mid
    a = lo / 2
    if not _certified(m, a):
        raise ScaleFactorError("no admissible scale factor found")
    return a


# --- serialization --------------------------------------------------------

def _parse_coordinate(raw, where: str) -> Fraction:
    if isinstance(raw, bool):
        raise ConfigurationFormatError(f"{where}: expected a rational, got {raw!r}")
    if isinstance(raw, (int, Decimal)):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigurationFormatError(f"{where}: invalid rational literal {raw!r}") from None
    raise ConfigurationFormatError(f"{where}: expected a rational, got {raw!r}")


def _plain(value):
    # Decimal only appears because the parser keeps JSON floats exact
    if isinstance(value, Decimal):
        return float(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def configuration_to_document(config: Configuration) -> dict:
    return {
        "version": FORMAT_VERSION,
        "points": [[str(p.x), str(p.y)] for p in config.points],
        "meta": config.meta.to_dict(),
    }


def configuration_from_document(doc) -> Configuration:
    if not isinstance(doc, dict):
        raise ConfigurationFormatError("document: expected an object")
    if doc.get("version") != FORMAT_VERSION:
        raise ConfigurationFormatError(f"version: expected {FORMAT_VERSION}, got {doc.get('version')!r}")
    raw_points = doc.get("points")
    if not isinstance(raw_points, list) or not raw_points:
        raise ConfigurationFormatError("points: expected a non-empty array")
    pts = []
    seen: dict[Point, int] = {}
    for i, item in enumerate(raw_points):
        if not isinstance(item, list) or len(item) != 2:
            raise ConfigurationFormatError(f"points[{i}]: expected [x, y]")
        p = Point(_parse_coordinate(item[0], f"points[{i}][0]"),
                  _parse_coordinate(item[1], f"points[{i}][1]"))
        if p in seen:
            raise ConfigurationFormatError(f"points[{i}]: duplicate point (same as points[{seen[p]}])")
        seen[p] = i
        pts.append(p)
    raw_meta = doc.get("meta", {})
    if not isinstance(raw_meta, dict):
        raise ConfigurationFormatError("meta: expected an object")
    params = _plain(raw_meta.get("params", {}))
    if not isinstance(params, dict):
        raise ConfigurationFormatError("meta.params: expected an object")
    seed = raw_meta.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigurationFormatError("meta.seed: expected an integer or null")
    rings = raw_meta.get("rings")
    if rings is not None:
        if not isinstance(rings, list) or len(rings) != len(pts):
            raise ConfigurationFormatError("meta.rings: expected one ring index per point")
        for i, r in enumerate(rings):
            if isinstance(r, bool) or not isinstance(r, int) or r < 0:
                raise ConfigurationFormatError(f"meta.rings[{i}]: expected a non-negative integer")
        rings = tuple(rings)
    generator = raw_meta.get("generator", "manual")
    if not isinstance(generator, str):
        raise ConfigurationFormatError("meta.generator: expected a string")
    return Configuration(tuple(pts), ConfigMeta(generator, params, seed, rings))


def dumps_configuration(config: Configuration) -> str:
    return dump_json(configuration_to_document(config))


def loads_configuration(text: str) -> Configuration:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ConfigurationFormatError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return configuration_from_document(doc)


def save_configuration(config: Configuration, destination) -> Path:
    return atomic_write_text(destination, dumps_configuration(config))


def load_configuration(source) -> Configuration:
    path = Path(source)
    try:
        return loads_configuration(path.read_text(encoding="utf-8"))
    except ConfigurationFormatError as exc:
        raise ConfigurationFormatError(f"{path}: {exc}") from None


def config_ref(config: Configuration) -> str:
    """SHA-256 of the canonical (sorted, compact) configuration document."""
    canon = json.dumps(configuration_to_document(config), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canon.encode("utf-8")).hexdigest()
