"""Shared instance builders and independent oracles for the test suite.

The oracles are deliberately coded in a different style from the package
(plain Python loops, table-filling dynamic programs, grid sweeps) so that
agreement between the two is evidence rather than tautology.
"""

from __future__ import annotations

from itertools import permutations, product

import numpy as np

from bittp import Item, build_instance
from bittp.cqm import Sample, SampleSet
from bittp.model import make_solution

# ---------------------------------------------------------------------------
# instance builders


def triangle(items=(), capacity=10.0, v_min=0.1, v_max=1.0):
    """3 cities, every leg costs 5; all Hamiltonian cycles have length 15."""
    d = [[0.0, 5.0, 5.0], [5.0, 0.0, 5.0], [5.0, 5.0, 0.0]]
    return build_instance(distance=d, items=items, capacity=capacity,
                          v_min=v_min, v_max=v_max, name="triangle")


def square4(items=(), capacity=10.0):
    """4 cities with unit edges and cost-2 diagonals. The perimeter tour
    (length 4) is strictly shorter than any diagonal-using cycle (6)."""
    d = [[0.0, 1.0, 2.0, 1.0],
         [1.0, 0.0, 1.0, 2.0],
         [2.0, 1.0, 0.0, 1.0],
         [1.0, 2.0, 1.0, 0.0]]
    return build_instance(distance=d, items=items, capacity=capacity,
                          name="square4")


def make_toy(seed, n=6, m=5):
    """Frozen end-to-end generator: integer grid coordinates, rounded-up
    Euclidean distances, capacity at 60% of the total item weight."""
    rng = np.random.default_rng(seed)
    coords = rng.integers(0, 60, size=(n, 2)).astype(float)
    dx = coords[:, 0][:, None] - coords[:, 0][None, :]
    dy = coords[:, 1][:, None] - coords[:, 1][None, :]
    dist = np.ceil(np.sqrt(dx ** 2 + dy ** 2))
    items = [Item(profit=float(rng.integers(5, 40)),
                  weight=float(rng.integers(2, 12)), city=int(c))
             for c in rng.integers(1, n, size=m)]
    cap = int(0.6 * sum(it.weight for it in items)) + 1
    return build_instance(distance=dist, items=items, capacity=cap,
                          v_min=0.1, v_max=1.0, name=f"toy{seed}")


def random_instance(seed, n=5, m=4, cap_frac=0.6):
    """Random integer-weight instance sized for enumeration oracles."""
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 30.0, size=(n, 2))
    dx = coords[:, 0][:, None] - coords[:, 0][None, :]
    dy = coords[:, 1][:, None] - coords[:, 1][None, :]
    dist = np.ceil(np.sqrt(dx ** 2 + dy ** 2))
    items = [Item(profit=float(rng.integers(1, 25)),
                  weight=float(rng.integers(1, 9)), city=int(c))
             for c in rng.integers(1, n, size=m)]
    if m:
        # capacity covers the heaviest single item so every item is
        # individually selectable (keeps construction warning-free)
        cap = float(max(int(cap_frac * sum(it.weight for it in items)),
                        int(max(it.weight for it in items))))
    else:
        cap = 5.0
    return build_instance(distance=dist, items=items, capacity=cap,
                          v_min=0.1, v_max=1.0, name=f"rand{seed}")


def random_feasible_solution(instance, rng):
    """Random depot-anchored tour plus a greedy capacity-respecting plan."""
    tour = np.concatenate(
        ([0], rng.permutation(np.arange(1, instance.num_cities)))
    )
    picked = np.zeros(instance.num_items, dtype=bool)
    total = 0.0
    for m_idx in rng.permutation(instance.num_items):
        w = float(instance.weights[m_idx])
        if rng.random() < 0.6 and total + w <= instance.capacity:
            picked[m_idx] = True
            total += w
    return make_solution(instance, tour, picked)


# ---------------------------------------------------------------------------
# straight-line evaluation oracles (no numpy vectorization)


def oracle_prefix_weights(instance, tour, picked):
    """Accumulated knapsack weight after each tour position."""
    out = []
    total = 0.0
    for city in tour:
        for m_idx in range(instance.num_items):
            if picked[m_idx] and int(instance.item_city[m_idx]) == int(city):
                total += float(instance.weights[m_idx])
        out.append(total)
    return out


def oracle_travel_time(instance, tour, picked):
    """Leg-by-leg journey time with the load-dependent velocity written out."""
    cum = oracle_prefix_weights(instance, tour, picked)
    n = len(tour)
    total = 0.0
    for i in range(n):
        a, b = int(tour[i]), int(tour[(i + 1) % n])
        v = instance.v_max - (cum[i] / instance.capacity) * (
            instance.v_max - instance.v_min
        )
        total += float(instance.distance[a][b]) / v
    return total


def oracle_profit(instance, picked):
    total = 0.0
    for m_idx in range(instance.num_items):
        if picked[m_idx]:
            total += float(instance.profits[m_idx])
    return -total + 0.0


def dp_best_profit(profits, weights, capacity):
    """Classic table-filling knapsack dynamic program, integer weights."""
    cap = int(capacity)
    m = len(profits)
    table = [[0.0] * (cap + 1) for _ in range(m + 1)]
    for k in range(1, m + 1):
        w = int(weights[k - 1])
        p = float(profits[k - 1])
        for c in range(cap + 1):
            best = table[k - 1][c]
            if 0 < w <= c:
                cand = table[k - 1][c - w] + p
                if cand > best:
                    best = cand
            table[k][c] = best
    return table[m][cap]


# ---------------------------------------------------------------------------
# dominance and hypervolume oracles


def oracle_front(pairs):
    """Quadratic pairwise-domination filter; returns a sorted deduplicated
    list of (f, g) tuples."""
    out = set()
    for i, (f1, g1) in enumerate(pairs):
        dominated = False
        for j, (f2, g2) in enumerate(pairs):
            if j == i:
                continue
            if f2 <= f1 and g2 <= g1 and (f2 < f1 or g2 < g1):
                dominated = True
                break
        if not dominated:
            out.add((float(f1), float(g1)))
    return sorted(out)


def oracle_exhaustive_front(instance, band=None):
    """Second, independently coded enumerator over every tour and plan.
    Returns the sorted non-dominated (f, g) list."""
    pairs = []
    for perm in permutations(range(1, instance.num_cities)):
        tour = [0] + list(perm)
        for bits in product((0, 1), repeat=instance.num_items):
            picked = [bool(b) for b in bits]
            w = sum(float(instance.weights[k])
                    for k in range(instance.num_items) if picked[k])
            if w > instance.capacity:
                continue
            g = oracle_profit(instance, picked)
            if band is not None and not (band[0] <= g <= band[1]):
                continue
            pairs.append((oracle_travel_time(instance, tour, picked), g))
    return oracle_front(pairs)


def _rect_union_area(points):
    """Area of the union of [f, 1] x [g, 1] rectangles, summed cell by cell
    over the coordinate arrangement."""
    pts = [(float(f), float(g)) for f, g in points]
    if not pts:
        return 0.0
    xs = sorted(set([f for f, _ in pts] + [1.0]))
    ys = sorted(set([g for _, g in pts] + [1.0]))
    area = 0.0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            if any(f <= xs[i] and g <= ys[j] for f, g in pts):
                area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    return area


def oracle_hypervolume(point_sets, target):
    """Joint min-max scaling over the union of sets, then the rectangle
    union area of the target set against reference point (1, 1)."""
    all_f = [float(f) for s in point_sets for f, _ in s]
    all_g = [float(g) for s in point_sets for _, g in s]
    f_lo, f_hi = min(all_f), max(all_f)
    g_lo, g_hi = min(all_g), max(all_g)

    def scale(v, lo, hi):
        if hi == lo:
            return 0.0
        return (v - lo) / (hi - lo)

    pts = [(scale(float(f), f_lo, f_hi), scale(float(g), g_lo, g_hi))
           for f, g in point_sets[target]]
    return _rect_union_area(pts)


# ---------------------------------------------------------------------------
# backend stubs


class ScriptedBackend:
    """Replays a fixed list of assignments, one single-sample set per call.
    The last entry repeats once the script runs out."""

    kind = "scripted"

    def __init__(self, assignments):
        self._assignments = [np.asarray(a, dtype=np.uint8) for a in assignments]
        self.calls = 0

    def sample_cqm(self, model, seed=None):
        x = self._assignments[min(self.calls, len(self._assignments) - 1)]
        self.calls += 1
        return SampleSet(
            [Sample(assignment=x, energy=model.objective_value(x),
                    feasible=model.check_feasible(x))],
            info={"backend": "scripted"},
        )
