"""Binary encodings of tour+picking subproblems and sample decoding.

Variables: an N x N one-hot matrix (city v at tour position i) followed by
one pick bit per item. The travel objective is the fixed-divisor form: each
leg's distance is scaled by capacity and divided by the caller-supplied
per-position divisor ``b[i]``, so the whole objective stays quadratic.
Profit-band and capacity constraints are written linearly in the pick bits
by default (equivalent under the one-hot rows); the quadratic variants that
multiply in the tour bits are available behind ``quadratic_forms`` so the
equivalence itself can be tested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cqm import CqmModel
from .instance import TtpInstance
from .model import Solution, make_solution

__all__ = [
    "EncodeError",
    "DecodeError",
    "VariableLayout",
    "encode_subproblem",
    "encode_profit_bound",
    "encode_weighted_sum",
    "assignment_from",
    "decode",
]

_BAND_TOL = 1e-9


class EncodeError(ValueError):
    pass


class DecodeError(ValueError):
    """One-hot structure violated; names the offending position or city."""

    def __init__(self, message: str, position: int | None = None,
                 city: int | None = None):
        super().__init__(message)
        self.position = position
        self.city = city


@dataclass(frozen=True)
class VariableLayout:
    """Index map for one instance: tour bit (v, i) -> v*N + i, pick bit for
    item m -> N*N + m. The compact size is N^2 + M; the padded size pads
    every city to the largest per-city item count and is reported as a
    statistic only."""

    num_cities: int
    num_items: int
    items_by_city: tuple[tuple[int, ...], ...]

    @classmethod
    def from_instance(cls, instance: TtpInstance) -> "VariableLayout":
        return cls(
            num_cities=instance.num_cities,
            num_items=instance.num_items,
            items_by_city=tuple(tuple(ids) for ids in instance.items_at_city()),
        )

    def tour_var(self, city: int, position: int) -> int:
        n = self.num_cities
        if not (0 <= city < n and 0 <= position < n):
            raise EncodeError(f"tour variable ({city}, {position}) out of range")
        return city * n + position

    def pick_var(self, city: int, k: int) -> int:
        items = self.items_by_city[city]
        if not (0 <= k < len(items)):
            raise EncodeError(f"city {city + 1} has no item slot {k}")
        return self.num_cities ** 2 + items[k]

    def pick_var_by_item(self, item: int) -> int:
        if not (0 <= item < self.num_items):
            raise EncodeError(f"item index {item} out of range")
        return self.num_cities ** 2 + item

    @property
    def total_vars(self) -> int:
        return self.num_cities ** 2 + self.num_items

    @property
    def padded_total_vars(self) -> int:
        per_city = max((len(ids) for ids in self.items_by_city), default=0)
        return self.num_cities * (self.num_cities + per_city)


def _check_b(instance: TtpInstance, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (instance.num_cities,):
        raise EncodeError(
            f"need one divisor per tour position, got shape {b.shape}"
        )
    if not (b > 0).all():
        raise EncodeError("per-position divisors must be positive")
    return b


def _add_travel_objective(model: CqmModel, instance: TtpInstance,
                          layout: VariableLayout, b: np.ndarray,
                          weight: float = 1.0) -> None:
    n = instance.num_cities
    d = instance.distance
    cap = instance.capacity
    for i in range(n):
        nxt = (i + 1) % n
        scale = weight * cap / b[i]
        for u in range(n):
            row = d[u]
            for v in range(n):
                if u == v or row[v] == 0.0:
                    continue
                model.add_quadratic(
                    layout.tour_var(u, i), layout.tour_var(v, nxt),
                    scale * row[v],
                )


def _add_permutation_constraints(model: CqmModel, layout: VariableLayout) -> None:
    n = layout.num_cities
    for i in range(n):
        model.add_constraint(
            {layout.tour_var(v, i): 1.0 for v in range(n)},
            sense="==", bound=1.0, label=f"position_onehot[{i}]",
        )
    for v in range(n):
        model.add_constraint(
            {layout.tour_var(v, i): 1.0 for i in range(n)},
            sense="==", bound=1.0, label=f"city_onehot[{v}]",
        )
    model.add_constraint(
        {layout.tour_var(0, 0): 1.0}, sense="==", bound=1.0, label="depot_pin",
    )


def _profit_terms(instance: TtpInstance, layout: VariableLayout,
                  quadratic: bool):
    """Coefficients of g = -sum(profit * pick): linear in the pick bits, or
    spread over (tour bit, pick bit) products in the quadratic variant."""
    if not quadratic:
        lin = {
            layout.pick_var_by_item(m): -float(instance.profits[m])
            for m in range(instance.num_items)
        }
        return lin, {}
    quad = {}
    for m in range(instance.num_items):
        home = int(instance.item_city[m])
        z = layout.pick_var_by_item(m)
        for i in range(instance.num_cities):
            quad[(layout.tour_var(home, i), z)] = -float(instance.profits[m])
    return {}, quad


def _weight_terms(instance: TtpInstance, layout: VariableLayout,
                  quadratic: bool):
    if not quadratic:
        lin = {
            layout.pick_var_by_item(m): float(instance.weights[m])
            for m in range(instance.num_items)
        }
        return lin, {}
    quad = {}
    for m in range(instance.num_items):
        home = int(instance.item_city[m])
        z = layout.pick_var_by_item(m)
        for i in range(instance.num_cities):
            quad[(layout.tour_var(home, i), z)] = float(instance.weights[m])
    return {}, quad


def _add_capacity_constraint(model: CqmModel, instance: TtpInstance,
                             layout: VariableLayout, quadratic: bool) -> None:
    if instance.num_items == 0:
        return
    lin, quad = _weight_terms(instance, layout, quadratic)
    model.add_constraint(lin, quad, sense="<=",
                         bound=float(instance.capacity), label="capacity")


def _add_band_constraints(model: CqmModel, instance: TtpInstance,
                          layout: VariableLayout, band: tuple[float, float],
                          quadratic: bool) -> None:
    eps_lo, eps_hi = float(band[0]), float(band[1])
    if eps_lo > eps_hi + _BAND_TOL:
        raise EncodeError(f"band lower bound {eps_lo} exceeds upper bound {eps_hi}")
    if eps_hi > _BAND_TOL:
        raise EncodeError(f"band upper bound {eps_hi} must be <= 0")
    if instance.num_items == 0:
        if eps_hi < -_BAND_TOL:
            raise EncodeError(
                "band excludes profit 0, the only value an item-free "
                "instance can reach"
            )
        return
    lin, quad = _profit_terms(instance, layout, quadratic)
    model.add_constraint(lin, quad, sense=">=", bound=eps_lo, label="band_lower")
    model.add_constraint(lin, quad, sense="<=", bound=eps_hi, label="band_upper")


def _add_velocity_floor_constraints(model: CqmModel, instance: TtpInstance,
                                    layout: VariableLayout,
                                    b: np.ndarray) -> None:
    """One constraint per tour position: the weight accumulated through that
    position may not push the travel speed below what ``b[i]`` certifies.
    Stored on the accumulated-weight side, so coefficients are the item
    weights and the constraint value of any assignment is that prefix
    weight."""
    if instance.num_items == 0:
        return
    n = instance.num_cities
    span = instance.v_max - instance.v_min
    ceiling = instance.capacity * instance.v_max
    for i in range(n):
        limit = (ceiling - b[i]) / span
        coeffs = {}
        for m in range(instance.num_items):
            home = int(instance.item_city[m])
            z = layout.pick_var_by_item(m)
            w = float(instance.weights[m])
            for j in range(i + 1):
                coeffs[(layout.tour_var(home, j), z)] = w
        model.add_constraint(
            quadratic=coeffs, sense="<=", bound=limit,
            label=f"velocity_floor[{i}]",
        )


def encode_subproblem(
    instance: TtpInstance,
    band: tuple[float, float],
    b,
    *,
    quadratic_forms: bool = False,
) -> CqmModel:
    """CQM whose minimum over the band is the band's best travel time.

    Objective: sum over legs of capacity * distance / b[position], encoded
    on products of consecutive tour bits (with the wrap leg back to position
    0). Constraints: one-hot rows and columns, depot pinned at position 0,
    capacity, inclusive profit band, and the per-position velocity floors
    tied to ``b``.
    """
    b = _check_b(instance, b)
    layout = VariableLayout.from_instance(instance)
    model = CqmModel(layout.total_vars)
    _add_travel_objective(model, instance, layout, b)
    _add_permutation_constraints(model, layout)
    _add_capacity_constraint(model, instance, layout, quadratic_forms)
    _add_band_constraints(model, instance, layout, band, quadratic_forms)
    _add_velocity_floor_constraints(model, instance, layout, b)
    return model


def encode_profit_bound(instance: TtpInstance) -> CqmModel:
    """Pure knapsack over the pick bits alone: minimize -profit subject to
    capacity. Tour variables are omitted entirely."""
    m = instance.num_items
    model = CqmModel(m)
    for k in range(m):
        model.add_linear(k, -float(instance.profits[k]))
    if m:
        model.add_constraint(
            {k: float(instance.weights[k]) for k in range(m)},
            sense="<=", bound=float(instance.capacity), label="capacity",
        )
    return model


def encode_weighted_sum(
    instance: TtpInstance,
    alpha: float,
    b,
    *,
    quadratic_forms: bool = False,
) -> CqmModel:
    """Scalarized objective alpha * travel + (1 - alpha) * (-profit) with
    the same constraints as the band subproblem minus the band itself."""
    if not (0.0 <= alpha <= 1.0):
        raise EncodeError(f"alpha must lie in [0, 1], got {alpha}")
    b = _check_b(instance, b)
    layout = VariableLayout.from_instance(instance)
    model = CqmModel(layout.total_vars)
    if alpha:
        _add_travel_objective(model, instance, layout, b, weight=alpha)
    if alpha != 1.0:
        lin, quad = _profit_terms(instance, layout, quadratic_forms)
        for idx, c in lin.items():
            model.add_linear(idx, (1.0 - alpha) * c)
        for (i, j), c in quad.items():
            model.add_quadratic(i, j, (1.0 - alpha) * c)
    _add_permutation_constraints(model, layout)
    _add_capacity_constraint(model, instance, layout, quadratic_forms)
    _add_velocity_floor_constraints(model, instance, layout, b)
    return model


def assignment_from(layout: VariableLayout, solution: Solution) -> np.ndarray:
    """Binary assignment vector whose decode reproduces ``solution``."""
    x = np.zeros(layout.total_vars, dtype=np.uint8)
    for position, city in enumerate(solution.tour):
        x[layout.tour_var(int(city), position)] = 1
    for item in np.flatnonzero(solution.picked):
        x[layout.pick_var_by_item(int(item))] = 1
    return x


def decode(instance: TtpInstance, assignment,
           layout: VariableLayout | None = None) -> Solution:
    """Read the tour off the one-hot matrix row by row and copy the pick
    bits; objectives are recomputed from scratch. Any one-hot violation is
    a structured error, never a silently repaired tour."""
    if layout is None:
        layout = VariableLayout.from_instance(instance)
    x = np.asarray(assignment)
    if x.shape != (layout.total_vars,):
        raise DecodeError(
            f"assignment length {x.shape}, expected ({layout.total_vars},)"
        )
    n = layout.num_cities
    matrix = x[: n * n].reshape(n, n).astype(bool)
    tour = np.empty(n, dtype=np.intp)
    for i in range(n):
        cities = np.flatnonzero(matrix[:, i])
        if cities.size == 0:
            raise DecodeError(f"no city assigned to position {i + 1}",
                              position=i)
        if cities.size > 1:
            raise DecodeError(
                f"position {i + 1} claimed by cities "
                f"{[int(c) + 1 for c in cities]}", position=i,
                city=int(cities[0]),
            )
        tour[i] = cities[0]
    counts = np.bincount(tour, minlength=n)
    if (counts > 1).any():
        repeated = int(np.flatnonzero(counts > 1)[0])
        raise DecodeError(f"city {repeated + 1} appears at multiple positions",
                          city=repeated)
    if tour[0] != 0:
        raise DecodeError(
            f"position 1 holds city {int(tour[0]) + 1}, the tour must start "
            "at city 1", position=0, city=int(tour[0]),
        )
    picked = x[n * n:].astype(bool)
    return make_solution(instance, tour, picked)
