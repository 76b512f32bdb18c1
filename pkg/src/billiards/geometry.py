"""Exact planar primitives and the turn-admissibility predicate.

Coordinates are :class:`fractions.Fraction` values. Under the default
right-angle policy a turn is decided by the sign of one exact dot product,
so no rounding ever enters the core game.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

Scalar = Fraction
Number = Union[int, Fraction, str]

#: Absolute tolerance on cosines for the general (floating-point) policy.
COS_TOLERANCE = 1e-12


class DegenerateSegmentError(ValueError):
    pass


def to_scalar(value: Number) -> Fraction:
    """Parse an int, Fraction, ``"p/q"`` string or decimal literal exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, float):
        raise TypeError("float coordinates are not exact; pass a string or Fraction")
    return Fraction(value)


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: Number, y: Number) -> "Point":
        return cls(to_scalar(x), to_scalar(y))

    def __sub__(self, other: "Point") -> "Point":  # type: ignore[override]
        return Point(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point") -> "Point":  # type: ignore[override]
        return Point(self.x + other.x, self.y + other.y)

    def scaled(self, factor: Fraction) -> "Point":
        return Point(self.x * factor, self.y * factor)

    def __repr__(self) -> str:
        return f"Point({self.x}, {self.y})"


def dot(u: Point, v: Point) -> Fraction:
    return u.x * v.x + u.y * v.y


def squared_distance(p: Point, q: Point) -> Fraction:
    d = p - q
    return dot(d, d)


@dataclass(frozen=True)
class AnglePolicy:
    """Admissible turn interval ``(alpha, pi]``.

    ``exact=True`` means alpha is exactly pi/2 and decisions are made from
    the sign of an exact dot product. Any other alpha is evaluated in double
    precision with :data:`COS_TOLERANCE`; turns within the tolerance band of
    the boundary are rejected.
    """

    alpha: float = math.pi / 2
    exact: bool = True
    strict_lower: bool = True

    def __post_init__(self):
        if self.exact and self.alpha != math.pi / 2:
            raise ValueError("the exact policy is only defined for alpha = pi/2")
        if not 0 <= self.alpha < math.pi:
            raise ValueError(f"alpha must lie in [0, pi), got {self.alpha!r}")

    @classmethod
    def right_angle(cls) -> "AnglePolicy":
        return cls()

    @classmethod
    def general(cls, alpha: float) -> "AnglePolicy":
        return cls(alpha=float(alpha), exact=False)

    @classmethod
    def from_degrees(cls, degrees: float) -> "AnglePolicy":
        # 90 degrees always maps to the exact predicate
        if degrees == 90:
            return cls.right_angle()
        return cls.general(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return 90.0 if self.exact else math.degrees(self.alpha)

    @property
    def label(self) -> str:
        """Degree label used in reports, e.g. ``"90"`` or ``"37.5"``."""
        return format_degrees(self.degrees)


RIGHT_ANGLE = AnglePolicy.right_angle()


def format_degrees(degrees: float) -> str:
    rounded = round(degrees, 9)
    if rounded == int(rounded):
        return str(int(rounded))
    return repr(rounded)


def turn_admissible(prev: Point, cur: Point, nxt: Point,
                    policy: AnglePolicy = RIGHT_ANGLE) -> bool:
    """True iff the angle at ``cur`` between cur-prev and cur-nxt is in (alpha, pi]."""
    if prev == cur or nxt == cur:
        raise DegenerateSegmentError("degenerate segment")
    u = prev - cur
    v = nxt - cur
    d = dot(u, v)
    if policy.exact:
        return d < 0
    # normalise in floating point; Fraction -> float is correctly rounded
    nu = math.hypot(float(u.x), float(u.y))
    nv = math.hypot(float(v.x), float(v.y))
    cos_angle = float(d) / (nu * nv)
    return cos_angle < math.cos(policy.alpha) - COS_TOLERANCE


@dataclass(frozen=True)
class RationalRotation:
    """Rotation with cos = (1-t^2)/(1+t^2), sin = 2t/(1+t^2) for rational t."""

    t: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "t", to_scalar(self.t))

    @property
    def cos(self) -> Fraction:
        return (1 - self.t * self.t) / (1 + self.t * self.t)

    @property
    def sin(self) -> Fraction:
        return 2 * self.t / (1 + self.t * self.t)

    def apply(self, p: Point) -> Point:
        c, s = self.cos, self.sin
        return Point(c * p.x - s * p.y, s * p.x + c * p.y)


def rotate_configuration(points: Iterable[Point], rotation: RationalRotation) -> list[Point]:
    c, s = rotation.cos, rotation.sin
    return [Point(c * p.x - s * p.y, s * p.x + c * p.y) for p in points]


def coordinates_distinct(points: Sequence[Point]) -> bool:
    xs = {p.x for p in points}
    ys = {p.y for p in points}
    return len(xs) == len(points) and len(ys) == len(points)
