"""Exhaustive enumeration over all tours and picking plans.

Ground truth for tiny instances only: every depot-anchored tour crossed
with every subset of items, evaluated exactly. A hard size guard keeps the
enumeration honest about its cost. Plans are vectorized as bitmask rows so
a tour's travel times for all subsets come from one cumulative-sum pass.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from .instance import TtpInstance
from .model import make_solution
from .pareto import ObjectivePoint, ParetoFront, filter_nondominated

__all__ = [
    "OracleSizeError",
    "MAX_CITIES",
    "MAX_ITEMS",
    "exhaustive_front",
    "exhaustive_band_optimum",
    "iter_feasible_solutions",
]

MAX_CITIES = 8
MAX_ITEMS = 12


class OracleSizeError(ValueError):
    pass


def _check_size(instance: TtpInstance) -> None:
    if instance.num_cities > MAX_CITIES or instance.num_items > MAX_ITEMS:
        raise OracleSizeError(
            f"enumeration guard: {instance.num_cities} cities / "
            f"{instance.num_items} items exceeds {MAX_CITIES} / {MAX_ITEMS}"
        )


def _plan_tables(instance: TtpInstance):
    """All 2^M picking plans as rows: pick flags, total weight, profit
    objective, and per-city weight contributions."""
    m = instance.num_items
    masks = np.arange(1 << m, dtype=np.int64)
    picks = ((masks[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)
    if m:
        total_w = picks @ instance.weights
        g_all = -(picks @ instance.profits) + 0.0  # normalize -0.0
    else:
        total_w = np.zeros(1)
        g_all = np.zeros(1)
    city_w = np.zeros((1 << m, instance.num_cities))
    for k in range(m):
        city_w[picks[:, k], instance.item_city[k]] += instance.weights[k]
    return picks, total_w, g_all, city_w


def exhaustive_front(
    instance: TtpInstance,
    band: tuple[float, float] | None = None,
) -> ParetoFront:
    """Exact non-dominated set, optionally restricted to an inclusive
    profit band. Every front point carries a witness Solution."""
    _check_size(instance)
    picks, total_w, g_all, city_w = _plan_tables(instance)
    keep = total_w <= instance.capacity
    if band is not None:
        lo, hi = band
        keep &= (g_all >= lo) & (g_all <= hi)
    if not keep.any():
        return ParetoFront(())
    picks, g_all, city_w = picks[keep], g_all[keep], city_w[keep]

    n = instance.num_cities
    span = instance.v_max - instance.v_min
    cap = instance.capacity
    best_f = np.full(picks.shape[0], np.inf)
    best_tour = np.zeros(picks.shape[0], dtype=np.int64)
    tours = []
    for ti, perm in enumerate(permutations(range(1, n))):
        tour = np.array((0,) + perm, dtype=np.intp)
        tours.append(tour)
        legs = instance.distance[tour, np.roll(tour, -1)]
        cum = np.cumsum(city_w[:, tour], axis=1)
        velocities = instance.v_max - (cum / cap) * span
        f_all = (legs[None, :] / velocities).sum(axis=1)
        better = f_all < best_f
        best_f[better] = f_all[better]
        best_tour[better] = ti

    points = []
    for k in range(picks.shape[0]):
        sol = make_solution(instance, tours[best_tour[k]], picks[k])
        points.append(ObjectivePoint(f=float(best_f[k]), g=float(g_all[k]),
                                     solution=sol))
    return filter_nondominated(points)


def exhaustive_band_optimum(
    instance: TtpInstance,
    band: tuple[float, float],
) -> ObjectivePoint | None:
    """Lowest-travel-time point inside a band, or None when the band admits
    no feasible plan."""
    front = exhaustive_front(instance, band)
    return front.points[0] if front.points else None


def iter_feasible_solutions(instance: TtpInstance,
                            band: tuple[float, float] | None = None):
    """Yield every capacity-feasible (tour, plan) solution, optionally
    band-restricted. Same size guard as the front enumeration."""
    _check_size(instance)
    picks, total_w, g_all, _ = _plan_tables(instance)
    keep = total_w <= instance.capacity
    if band is not None:
        lo, hi = band
        keep &= (g_all >= lo) & (g_all <= hi)
    kept = np.flatnonzero(keep)
    n = instance.num_cities
    for perm in permutations(range(1, n)):
        tour = np.array((0,) + perm, dtype=np.intp)
        for k in kept:
            yield make_solution(instance, tour, picks[k])
