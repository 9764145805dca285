"""Exact evaluation of tours and picking plans.

Objectives follow the bi-objective convention: ``f`` is total travel time
(minimize) and ``g`` is negated collected profit (minimize, always <= 0).
All evaluation is pure; solutions are value types safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .instance import TtpInstance

__all__ = [
    "Solution",
    "OverweightError",
    "InvalidTourError",
    "cumulative_weights",
    "travel_time",
    "profit_objective",
    "is_feasible",
    "make_solution",
]


class OverweightError(ValueError):
    """Total picked weight exceeds the knapsack capacity."""


class InvalidTourError(ValueError):
    """Tour is not a depot-anchored permutation of all cities."""


def _check_tour(instance: TtpInstance, tour: np.ndarray) -> None:
    n = instance.num_cities
    if tour.shape != (n,):
        raise InvalidTourError(f"tour length {tour.shape[0]}, expected {n}")
    if tour[0] != 0:
        raise InvalidTourError("tour must start at city 1 (the depot)")
    seen = np.zeros(n, dtype=bool)
    seen[tour] = True
    if not seen.all():
        raise InvalidTourError("tour is not a permutation of all cities")


@dataclass(frozen=True)
class Solution:
    """A tour permutation plus a picking plan with cached objective values.

    ``tour`` holds 0-based city indices with ``tour[0] == 0``; ``picked`` is
    one boolean per item. Cached values are computed eagerly on construction
    (mutation means building a new Solution, so caches cannot go stale).
    For an overweight plan ``f`` is stored as ``inf``; the ``travel_time``
    operation raises instead.
    """

    tour: np.ndarray
    picked: np.ndarray
    f: float = field(init=False)
    g: float = field(init=False)
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tour = np.asarray(self.tour, dtype=np.intp)
        picked = np.asarray(self.picked, dtype=bool)
        tour.flags.writeable = False
        picked.flags.writeable = False
        object.__setattr__(self, "tour", tour)
        object.__setattr__(self, "picked", picked)

    def _evaluate(self, instance: TtpInstance) -> None:
        _check_tour(instance, self.tour)
        if self.picked.shape != (instance.num_items,):
            raise ValueError(
                f"picking plan length {self.picked.shape[0]}, "
                f"expected {instance.num_items}"
            )
        cum = cumulative_weights(instance, self)
        cum.flags.writeable = False
        object.__setattr__(self, "cumulative", cum)
        # the + 0.0 turns an empty plan's -0.0 into a plain 0.0
        g = -float(instance.profits[self.picked].sum()) + 0.0 if instance.num_items else 0.0
        object.__setattr__(self, "g", g)
        if cum[-1] > instance.capacity:
            object.__setattr__(self, "f", math.inf)
        else:
            object.__setattr__(self, "f", _travel_time_from_cum(instance, self.tour, cum))

    @property
    def total_weight(self) -> float:
        return float(self.cumulative[-1])

    def picked_ids(self) -> list[int]:
        return [int(m) for m in np.flatnonzero(self.picked)]


def make_solution(instance: TtpInstance, tour, picked) -> Solution:
    """Build and eagerly evaluate a Solution against ``instance``."""
    sol = Solution(tour=np.asarray(tour, dtype=np.intp),
                   picked=np.asarray(picked, dtype=bool))
    sol._evaluate(instance)
    return sol


def cumulative_weights(instance: TtpInstance, solution: Solution) -> np.ndarray:
    """Knapsack weight after each tour position (non-decreasing by design)."""
    per_city = np.zeros(instance.num_cities)
    if instance.num_items:
        np.add.at(per_city, instance.item_city[solution.picked],
                  instance.weights[solution.picked])
    return np.cumsum(per_city[solution.tour])


def _travel_time_from_cum(instance: TtpInstance, tour: np.ndarray,
                          cum: np.ndarray) -> float:
    span = instance.v_max - instance.v_min
    legs = instance.distance[tour, np.roll(tour, -1)]
    velocities = instance.v_max - (cum / instance.capacity) * span
    return float(np.sum(legs / velocities))


def travel_time(instance: TtpInstance, solution: Solution) -> float:
    """Total journey duration, leg by leg, with the wrap leg back to city 1.

    Raises :class:`OverweightError` when the plan exceeds capacity rather
    than ever evaluating a velocity below ``v_min``.
    """
    cum = solution.cumulative
    if cum[-1] > instance.capacity:
        raise OverweightError(
            f"picked weight {cum[-1]} exceeds capacity {instance.capacity}"
        )
    return _travel_time_from_cum(instance, solution.tour, cum)


def profit_objective(instance: TtpInstance, solution: Solution) -> float:
    """Negated total picked profit; zero when nothing is picked."""
    return solution.g


def is_feasible(
    instance: TtpInstance,
    solution: Solution,
    band: tuple[float, float] | None = None,
) -> bool:
    """Depot-anchored valid tour, capacity respected, and (optionally) the
    profit objective inside the inclusive band ``[eps_lo, eps_hi]``."""
    try:
        _check_tour(instance, solution.tour)
    except InvalidTourError:
        return False
    if solution.total_weight > instance.capacity:
        return False
    if band is not None:
        lo, hi = band
        if not (lo <= solution.g <= hi):
            return False
    return True
