"""Pick-plan refinement that never touches the tour.

Phase 1 walks every ordered pair of the plan flattened along the tour and
moves a picked item to a later, currently unpicked slot whenever that
strictly lowers travel time while staying feasible. Phase 2 then drops
picked items greedily while the solution stays inside the capacity and
profit band. Output travel time never exceeds the input's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import TtpInstance
from .model import Solution, is_feasible, make_solution

__all__ = ["FlattenedPlan", "flatten_plan", "lea_refine", "InfeasibleInputError"]


class InfeasibleInputError(ValueError):
    """Refinement needs a capacity- and band-feasible starting solution."""


@dataclass(frozen=True)
class FlattenedPlan:
    """Item ids ordered by (tour position of the item's city, item id) with
    the pick flags aligned to that order."""

    order: np.ndarray
    flags: np.ndarray

    def __post_init__(self):
        order = np.asarray(self.order, dtype=np.intp)
        flags = np.asarray(self.flags, dtype=bool)
        order.flags.writeable = False
        flags.flags.writeable = False
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "flags", flags)


def flatten_plan(instance: TtpInstance, solution: Solution) -> FlattenedPlan:
    m = instance.num_items
    if m == 0:
        return FlattenedPlan(order=np.empty(0, dtype=np.intp),
                             flags=np.empty(0, dtype=bool))
    position_of = np.empty(instance.num_cities, dtype=np.intp)
    position_of[solution.tour] = np.arange(instance.num_cities)
    ids = np.arange(m)
    order = np.lexsort((ids, position_of[instance.item_city]))
    return FlattenedPlan(order=order, flags=solution.picked[order])


def lea_refine(
    instance: TtpInstance,
    solution: Solution,
    band: tuple[float, float] | None = None,
    *,
    collect: list | None = None,
) -> Solution:
    """Two-phase local improvement of the picking plan; the tour is fixed.

    Raises :class:`InfeasibleInputError` on an infeasible seed. Both phases
    re-evaluate candidates from scratch and check feasibility against the
    capacity and, when given, the inclusive profit band. When ``collect``
    is given, every accepted intermediate solution is appended to it (they
    are all feasible and often sit at distinct profit levels).
    """
    if not is_feasible(instance, solution, band):
        raise InfeasibleInputError(
            "starting solution violates capacity or the profit band"
        )
    flat = flatten_plan(instance, solution)
    order = flat.order
    flags = flat.flags.copy()
    m = order.shape[0]
    current = solution

    for p in range(m - 1):
        if not flags[p]:
            continue
        for q in range(p + 1, m):
            if flags[q]:
                continue
            picked = current.picked.copy()
            picked[order[p]] = False
            picked[order[q]] = True
            candidate = make_solution(instance, current.tour, picked)
            if candidate.f < current.f and is_feasible(instance, candidate, band):
                current = candidate
                flags[p] = False
                flags[q] = True
                if collect is not None:
                    collect.append(candidate)
                break  # slot p is empty now; move on to the next source

    for p in range(m):
        if not flags[p]:
            continue
        picked = current.picked.copy()
        picked[order[p]] = False
        candidate = make_solution(instance, current.tour, picked)
        if is_feasible(instance, candidate, band):
            current = candidate
            flags[p] = False
            if collect is not None:
                collect.append(candidate)

    return current
