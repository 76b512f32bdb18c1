"""Lower-bound construction: long admissible trajectories from monotone chains.

Rotate the configuration so all x- and all y-coordinates are distinct, sort
by x and take a longest strictly monotone run of y-values. Consecutive
difference vectors along such a chain share the same strict sign pattern,
so every interior turn has a negative dot product and is admissible.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .configuration import Configuration, config_ref
from .geometry import RationalRotation, coordinates_distinct, rotate_configuration
from .solver import Trajectory

#: First rotation candidate is t = 1/ROTATION_BASE, then 1/(ROTATION_BASE + 1), ...
ROTATION_BASE = 997

INCREASING = "increasing"
DECREASING = "decreasing"


@dataclass(frozen=True)
class MonotoneWitness:
    t: Fraction
    order: tuple[int, ...]
    indices: tuple[int, ...]
    direction: str

    @property
    def length(self) -> int:
        return len(self.indices)


def lower_bound(n: int) -> int:
    """floor(sqrt(n - 1) + 1), in integer arithmetic."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return isqrt(n - 1) + 1


def general_position_rotation(config: Configuration) -> Fraction:
    i = 0
    while True:
        t = Fraction(1, ROTATION_BASE + i)
        if coordinates_distinct(rotate_configuration(config.points, RationalRotation(t))):
            return t
        i += 1


def _longest_increasing(values: Sequence) -> list[int]:
    # patience sorting: tails[k] = index of smallest tail of an increasing run of length k+1
    tails: list[int] = []
    tail_values: list = []
    parent = [-1] * len(values)
    for i, v in enumerate(values):
        k = bisect_left(tail_values, v)
        if k > 0:
            parent[i] = tails[k - 1]
        if k == len(tails):
            tails.append(i)
            tail_values.append(v)
        else:
            tails[k] = i
            tail_values[k] = v
    out = []
    i = tails[-1] if tails else -1
    while i != -1:
        out.append(i)
        i = parent[i]
    out.reverse()
    return out


def longest_monotone_subsequence(values: Sequence) -> tuple[list[int], str]:
    """Positions of a longest strictly monotone subsequence and its direction.

    Ties between the increasing and decreasing candidates go to increasing.
    Values must be pairwise distinct.
    """
    if len(set(values)) != len(values):
        raise ValueError("values must be pairwise distinct")
    inc = _longest_increasing(values)
    dec = _longest_increasing([-v for v in values])
    if len(dec) > len(inc):
        return dec, DECREASING
    return inc, INCREASING


def monotone_witness(config: Configuration) -> MonotoneWitness:
    t = general_position_rotation(config)
    rotated = rotate_configuration(config.points, RationalRotation(t))
    order = sorted(range(len(rotated)), key=lambda i: rotated[i].x)
    positions, direction = longest_monotone_subsequence([rotated[i].y for i in order])
    return MonotoneWitness(t, tuple(order), tuple(order[p] for p in positions), direction)


def es_trajectory(config: Configuration) -> Trajectory:
    """Admissible trajectory of length at least ``lower_bound(n)``, in original indices."""
    return Trajectory(monotone_witness(config).indices)


def trajectory_to_document(config: Configuration, trajectory: Trajectory,
                           witness: MonotoneWitness | None = None, policy_label: str = "90") -> dict:
    doc = {
        "config_ref": config_ref(config),
        "indices": list(trajectory.indices),
        "length": trajectory.length,
        "policy": policy_label,
    }
    if witness is not None:
        doc["witness"] = {"t": str(witness.t), "direction": witness.direction}
    return doc
