import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bittp import Item, make_solution, profit_objective, travel_time
from bittp.model import (
    InvalidTourError,
    OverweightError,
    cumulative_weights,
    is_feasible,
)

from helpers import (
    oracle_prefix_weights,
    oracle_profit,
    oracle_travel_time,
    random_feasible_solution,
    random_instance,
    triangle,
)


def test_cumulative_weights_empty_plan():
    inst = triangle()
    sol = make_solution(inst, [0, 1, 2], [])
    assert np.array_equal(sol.cumulative, [0.0, 0.0, 0.0])


def test_cumulative_weights_single_item():
    inst = triangle(items=[Item(profit=5, weight=10, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    assert np.array_equal(sol.cumulative, [0.0, 10.0, 10.0])


@given(st.integers(0, 200))
def test_cumulative_weights_match_per_prefix_oracle(seed):
    inst = random_instance(seed, n=5, m=4)
    rng = np.random.default_rng(seed + 1)
    sol = random_feasible_solution(inst, rng)
    got = cumulative_weights(inst, sol)
    want = oracle_prefix_weights(inst, sol.tour, sol.picked)
    assert np.allclose(got, want, atol=1e-12)


def test_travel_time_unloaded_triangle():
    inst = triangle()
    sol = make_solution(inst, [0, 1, 2], [])
    assert travel_time(inst, sol) == 15.0
    assert sol.f == 15.0


def test_travel_time_fully_loaded_triangle():
    # one item filling the whole knapsack at the first stop: the remaining
    # two legs run at minimum speed
    inst = triangle(items=[Item(profit=5, weight=10, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    expect = 5.0 / 1.0 + 5.0 / 0.1 + 5.0 / 0.1
    assert travel_time(inst, sol) == pytest.approx(expect, abs=1e-12)
    assert sol.f == pytest.approx(105.0, abs=1e-9)


def test_travel_time_overweight_raises():
    inst = triangle(items=[Item(profit=5, weight=10, city=1),
                           Item(profit=5, weight=10, city=2)])
    sol = make_solution(inst, [0, 1, 2], [True, True])
    assert sol.f == math.inf
    with pytest.raises(OverweightError):
        travel_time(inst, sol)


@given(st.integers(0, 200))
def test_travel_time_matches_straight_line_oracle(seed):
    inst = random_instance(seed, n=6, m=5)
    rng = np.random.default_rng(seed + 7)
    sol = random_feasible_solution(inst, rng)
    assert travel_time(inst, sol) == pytest.approx(
        oracle_travel_time(inst, sol.tour, sol.picked), rel=1e-12
    )


def test_profit_objective_nothing_picked():
    inst = triangle(items=[Item(profit=10, weight=1, city=1)])
    sol = make_solution(inst, [0, 1, 2], [False])
    assert profit_objective(inst, sol) == 0.0
    # the empty plan must not leak a negative zero
    assert math.copysign(1.0, sol.g) == 1.0


def test_profit_objective_two_items():
    inst = triangle(items=[Item(profit=10, weight=1, city=1),
                           Item(profit=7, weight=1, city=2)])
    sol = make_solution(inst, [0, 1, 2], [True, True])
    assert profit_objective(inst, sol) == -17.0


@given(st.integers(0, 200))
def test_profit_objective_matches_summation_oracle(seed):
    inst = random_instance(seed, n=4, m=6)
    rng = np.random.default_rng(seed + 3)
    sol = random_feasible_solution(inst, rng)
    assert sol.g == pytest.approx(oracle_profit(inst, sol.picked), abs=1e-12)


def test_is_feasible_empty_plan_no_band():
    inst = triangle()
    assert is_feasible(inst, make_solution(inst, [0, 1, 2], []))


def test_is_feasible_band_membership():
    inst = triangle(items=[Item(profit=50, weight=2, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    assert sol.g == -50.0
    assert is_feasible(inst, sol, band=(-60.0, -40.0))
    assert not is_feasible(inst, sol, band=(-40.0, -20.0))


def test_is_feasible_inclusive_band_edges():
    inst = triangle(items=[Item(profit=50, weight=2, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    assert is_feasible(inst, sol, band=(-50.0, -50.0))


def test_is_feasible_capacity_boundary_inclusive():
    inst = triangle(items=[Item(profit=5, weight=10, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    assert sol.total_weight == inst.capacity
    assert is_feasible(inst, sol)


def test_is_feasible_overweight():
    inst = triangle(items=[Item(profit=5, weight=10, city=1),
                           Item(profit=5, weight=10, city=2)])
    sol = make_solution(inst, [0, 1, 2], [True, True])
    assert not is_feasible(inst, sol)


def test_make_solution_rejects_bad_tours():
    inst = triangle()
    with pytest.raises(InvalidTourError, match="depot"):
        make_solution(inst, [1, 0, 2], [])
    with pytest.raises(InvalidTourError, match="permutation"):
        make_solution(inst, [0, 1, 1], [])
    with pytest.raises(InvalidTourError, match="length"):
        make_solution(inst, [0, 1], [])


def test_make_solution_rejects_bad_plan_length():
    inst = triangle(items=[Item(profit=5, weight=1, city=1)])
    with pytest.raises(ValueError, match="plan length"):
        make_solution(inst, [0, 1, 2], [True, False])


def test_solution_arrays_are_read_only():
    inst = triangle(items=[Item(profit=5, weight=1, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    with pytest.raises(ValueError):
        sol.tour[0] = 2
    with pytest.raises(ValueError):
        sol.picked[0] = False


def test_picked_ids_are_sorted_global_indices():
    inst = triangle(items=[Item(profit=5, weight=1, city=1),
                           Item(profit=5, weight=1, city=2),
                           Item(profit=5, weight=1, city=2)])
    sol = make_solution(inst, [0, 2, 1], [True, False, True])
    assert sol.picked_ids() == [0, 2]
