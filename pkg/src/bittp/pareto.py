"""Non-dominated filtering and the two-objective hypervolume metric.

Both objectives are minimized. Hypervolume follows the cross-algorithm
protocol: min-max scale every point over the union of all compared sets,
then measure the area dominated with respect to the reference point (1, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "ObjectivePoint",
    "ParetoFront",
    "filter_nondominated",
    "dominates",
    "normalization_bounds",
    "hypervolume",
]


@dataclass(frozen=True)
class ObjectivePoint:
    f: float
    g: float
    solution: object | None = None


def _as_point(p) -> ObjectivePoint:
    if isinstance(p, ObjectivePoint):
        return p
    f, g = p
    return ObjectivePoint(float(f), float(g))


def dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """True when ``a`` is no worse in both objectives and better in one."""
    return a.f <= b.f and a.g <= b.g and (a.f < b.f or a.g < b.g)


@dataclass(frozen=True)
class ParetoFront:
    """Mutually non-dominated points, ascending in f, strictly descending in g."""

    points: tuple[ObjectivePoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def objectives(self) -> list[tuple[float, float]]:
        return [(p.f, p.g) for p in self.points]


def filter_nondominated(points: Iterable) -> ParetoFront:
    """Keep exactly the points not dominated by any other; deduplicate pairs.

    Input order never matters; for duplicate (f, g) pairs the first
    occurrence (and its solution reference) is retained.
    """
    pts = [_as_point(p) for p in points]
    # Stable sort by (f, g); a sweep keeping strictly decreasing g then
    # yields the non-dominated set for 2-D minimization.
    order = sorted(range(len(pts)), key=lambda i: (pts[i].f, pts[i].g))
    front: list[ObjectivePoint] = []
    seen: set[tuple[float, float]] = set()
    best_g = None
    for i in order:
        p = pts[i]
        if (p.f, p.g) in seen:
            continue
        if best_g is None or p.g < best_g:
            front.append(p)
            seen.add((p.f, p.g))
            best_g = p.g
    return ParetoFront(points=tuple(front))


def normalization_bounds(
    point_sets: Sequence[Iterable],
) -> tuple[float, float, float, float]:
    """(f_min, f_max, g_min, g_max) over the union of all provided sets."""
    fs: list[float] = []
    gs: list[float] = []
    for s in point_sets:
        for p in s:
            p = _as_point(p)
            fs.append(p.f)
            gs.append(p.g)
    if not fs:
        raise ValueError("cannot normalize an empty union of point sets")
    return min(fs), max(fs), min(gs), max(gs)


def _scale(value: float, lo: float, hi: float) -> float:
    # Zero range: the coordinate carries no information; map everything to 0
    # (best possible) by convention rather than failing.
    if hi == lo:
        return 0.0
    return (value - lo) / (hi - lo)


def hypervolume(point_sets: Sequence[Iterable], target: int = 0) -> float:
    """Hypervolume of ``point_sets[target]`` under joint min-max scaling.

    Computed by the sorted sweep over the scaled non-dominated subset:
    strips between consecutive f values, each of height (1 - g). Points on
    the reference boundary contribute zero area.
    """
    sets = [list(s) for s in point_sets]
    f_lo, f_hi, g_lo, g_hi = normalization_bounds(sets)
    scaled = [
        ObjectivePoint(_scale(_as_point(p).f, f_lo, f_hi),
                       _scale(_as_point(p).g, g_lo, g_hi))
        for p in sets[target]
    ]
    front = filter_nondominated(scaled).points
    area = 0.0
    for k, p in enumerate(front):
        next_f = front[k + 1].f if k + 1 < len(front) else 1.0
        area += (next_f - p.f) * (1.0 - p.g)
    return area
