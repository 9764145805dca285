import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bittp import Item, make_solution, solve, solve_band, travel_time
from bittp.encoder import VariableLayout, assignment_from
from bittp.model import is_feasible
from bittp.oracle import exhaustive_front
from bittp.solver import (
    SolverConfigError,
    compute_bounds,
    fractional_travel_time,
    make_schedule,
    update_b,
)

from helpers import (
    ScriptedBackend,
    dp_best_profit,
    random_feasible_solution,
    random_instance,
    square4,
    triangle,
)


# ---------------------------------------------------------------------------
# fixed divisors


def test_update_b_empty_plan_is_flat():
    inst = triangle()
    sol = make_solution(inst, [0, 1, 2], [])
    assert np.array_equal(update_b(inst, sol),
                          np.full(3, inst.capacity * inst.v_max))


def test_update_b_full_load_after_first_stop():
    inst = triangle(items=[Item(profit=5, weight=10, city=1)])
    sol = make_solution(inst, [0, 1, 2], [True])
    b = update_b(inst, sol)
    span = inst.v_max - inst.v_min
    want = inst.capacity * inst.v_max - sol.cumulative * span
    assert np.array_equal(b, want)
    assert b[0] == 10.0
    assert np.allclose(b[1:], 1.0, rtol=1e-12)


def test_update_b_rejects_overweight():
    from bittp.model import OverweightError

    inst = triangle(items=[Item(profit=5, weight=10, city=1),
                           Item(profit=5, weight=10, city=2)])
    sol = make_solution(inst, [0, 1, 2], [True, True])
    with pytest.raises(OverweightError):
        update_b(inst, sol)


@given(st.integers(0, 300))
@settings(max_examples=60)
def test_matched_divisors_collapse_to_the_true_travel_time(seed):
    inst = random_instance(seed, n=6, m=5)
    rng = np.random.default_rng(seed + 11)
    sol = random_feasible_solution(inst, rng)
    got = fractional_travel_time(inst, sol, update_b(inst, sol))
    assert got == pytest.approx(travel_time(inst, sol), rel=1e-12)


def test_fractional_travel_time_unit_divisors():
    inst = triangle()
    sol = make_solution(inst, [0, 1, 2], [])
    # every leg costs capacity * distance with divisors of one
    assert fractional_travel_time(inst, sol, np.ones(3)) == 10.0 * 15.0


# ---------------------------------------------------------------------------
# profit bounds


def test_bounds_no_items():
    assert compute_bounds(triangle()) == (0.0, 0.0)


def test_bounds_exact_dynamic_program():
    inst = triangle(items=[Item(profit=10, weight=5, city=1),
                           Item(profit=7, weight=4, city=2),
                           Item(profit=4, weight=3, city=2)], capacity=7)
    got = compute_bounds(inst, exact=True)
    assert got == (-dp_best_profit([10, 7, 4], [5, 4, 3], 7), 0.0)
    assert got == (-11.0, 0.0)


def test_bounds_exact_requires_integer_weights():
    inst = triangle(items=[Item(profit=10, weight=2.5, city=1)])
    with pytest.raises(SolverConfigError, match="integer"):
        compute_bounds(inst, exact=True)


def test_bounds_sampled_never_overshoots_the_optimum(fast_backend):
    inst = random_instance(77, n=4, m=6)
    g_min, g_max = compute_bounds(inst, fast_backend, seed=3)
    opt = dp_best_profit(inst.profits, inst.weights, int(inst.capacity))
    assert g_max == 0.0
    assert -opt <= g_min <= 0.0


def test_bounds_empty_plan_stub_warns():
    inst = triangle(items=[Item(profit=10, weight=2, city=1)])
    stub = ScriptedBackend([np.zeros(1, dtype=np.uint8)])
    with pytest.warns(UserWarning, match="degenerate"):
        assert compute_bounds(inst, stub) == (0.0, 0.0)


def test_bounds_infeasible_stub_warns_and_falls_back():
    inst = triangle(items=[Item(profit=10, weight=9, city=1),
                           Item(profit=10, weight=9, city=2)], capacity=10)
    stub = ScriptedBackend([np.ones(2, dtype=np.uint8)])  # overweight sample
    with pytest.warns(UserWarning, match="no feasible"):
        assert compute_bounds(inst, stub) == (0.0, 0.0)


# ---------------------------------------------------------------------------
# band schedule


def test_schedule_equal_levels_formula():
    schedule = make_schedule(-100.0, 0.0, 4)
    assert list(schedule.levels) == [-100.0, -75.0, -50.0, -25.0, 0.0]
    assert schedule.band(0) == (-100.0, -75.0)
    assert schedule.band(3) == (-25.0, 0.0)


def test_schedule_degenerate_spectrum():
    schedule = make_schedule(-100.0, -100.0, 3)
    assert list(schedule.levels) == [-100.0] * 4


def test_schedule_random_mode_sorted_and_pinned():
    schedule = make_schedule(-50.0, 0.0, 6, mode="random", seed=9)
    levels = list(schedule.levels)
    assert levels[0] == -50.0 and levels[-1] == 0.0
    assert levels == sorted(levels)
    assert all(-50.0 <= v <= 0.0 for v in levels)
    again = make_schedule(-50.0, 0.0, 6, mode="random", seed=9)
    assert list(again.levels) == levels


def test_schedule_validation():
    with pytest.raises(SolverConfigError, match="segment"):
        make_schedule(-1.0, 0.0, 0)
    with pytest.raises(SolverConfigError, match="exceeds"):
        make_schedule(1.0, 0.0, 2)
    with pytest.raises(SolverConfigError, match="<= 0"):
        make_schedule(-1.0, 0.5, 2)
    with pytest.raises(SolverConfigError, match="mode"):
        make_schedule(-1.0, 0.0, 2, mode="zig")
    with pytest.raises(SolverConfigError, match="out of range"):
        make_schedule(-1.0, 0.0, 2).band(2)


# ---------------------------------------------------------------------------
# single-band loop


def test_band_zero_profit_forces_the_empty_plan(fast_backend):
    inst = triangle(items=[Item(profit=5, weight=2, city=1)])
    result = solve_band(inst, (0.0, 0.0), fast_backend, seed=1)
    assert result.feasible
    assert result.solution.g == 0.0
    assert result.solution.f == 15.0


def test_unreachable_band_is_marked_not_raised(fast_backend):
    # reachable profits are {0, -10, -7, -17}; the band covers none of them
    inst = triangle(items=[Item(profit=10, weight=2, city=1),
                           Item(profit=7, weight=2, city=2)])
    result = solve_band(inst, (-5.0, -1.0), fast_backend, t_max=2, seed=1)
    assert not result.feasible
    assert result.solution is None
    assert result.iterations == 2
    assert result.f_trace == []


def test_band_loop_stops_on_first_non_improving_iterate():
    inst = square4()
    layout = VariableLayout.from_instance(inst)
    good = assignment_from(layout, make_solution(inst, [0, 1, 2, 3], []))
    worse = assignment_from(layout, make_solution(inst, [0, 2, 1, 3], []))
    backend = ScriptedBackend([good, worse])
    result = solve_band(inst, (0.0, 0.0), backend, t_max=5)
    assert result.iterations == 2
    assert result.solution.f == 4.0
    assert result.f_trace == [4.0, 6.0]
    assert [s.f for s in result.accepted] == [4.0]


def test_band_loop_keeps_improving_iterates():
    inst = square4()
    layout = VariableLayout.from_instance(inst)
    worse = assignment_from(layout, make_solution(inst, [0, 2, 1, 3], []))
    good = assignment_from(layout, make_solution(inst, [0, 1, 2, 3], []))
    backend = ScriptedBackend([worse, good, good])
    result = solve_band(inst, (0.0, 0.0), backend, t_max=3)
    # improvement at t=2 is accepted, the repeat at t=3 stops the loop
    assert result.iterations == 3
    assert result.solution.f == 4.0
    assert [s.f for s in result.accepted] == [6.0, 4.0]


def test_band_loop_legacy_break_keeps_the_predecessor():
    inst = square4()
    layout = VariableLayout.from_instance(inst)
    worse = assignment_from(layout, make_solution(inst, [0, 2, 1, 3], []))
    good = assignment_from(layout, make_solution(inst, [0, 1, 2, 3], []))
    backend = ScriptedBackend([worse, good])
    result = solve_band(inst, (0.0, 0.0), backend, t_max=5, legacy_break=True)
    assert result.iterations == 2
    assert result.solution.f == 6.0


def test_band_loop_retries_after_infeasible_rounds():
    inst = square4()
    layout = VariableLayout.from_instance(inst)
    broken = np.zeros(layout.total_vars, dtype=np.uint8)  # violates one-hot
    good = assignment_from(layout, make_solution(inst, [0, 1, 2, 3], []))
    backend = ScriptedBackend([broken, broken, good, good])
    result = solve_band(inst, (0.0, 0.0), backend, t_max=5)
    assert result.feasible
    assert result.solution.f == 4.0
    assert result.iterations >= 3


def test_band_loop_validates_t_max(fast_backend):
    with pytest.raises(SolverConfigError, match="t_max"):
        solve_band(triangle(), (0.0, 0.0), fast_backend, t_max=0)


# ---------------------------------------------------------------------------
# full pipeline


def test_solve_item_free_instance_has_a_single_front_point(quality_backend):
    report = solve(square4(), segments=3, backend=quality_backend, seed=2)
    assert len(report.front) == 1
    point = report.front.points[0]
    assert point.g == 0.0
    assert point.f == 4.0
    assert report.bounds == (0.0, 0.0)


def test_solve_single_segment_still_produces_a_point(fast_backend):
    inst = random_instance(50, n=4, m=3)
    report = solve(inst, segments=1, backend=fast_backend, seed=3,
                   exact_bounds=True)
    assert len(report.front) >= 1
    assert report.schedule.segments == 1


def test_solve_front_is_feasible_and_below_the_exact_front(quality_backend):
    inst = random_instance(60, n=5, m=4)
    report = solve(inst, segments=4, backend=quality_backend, seed=5,
                   exact_bounds=True)
    exact = exhaustive_front(inst).points
    assert len(report.front) >= 1
    for p in report.front.points:
        sol = p.solution
        again = make_solution(inst, sol.tour, sol.picked)
        assert is_feasible(inst, again)
        assert again.f == pytest.approx(p.f, rel=1e-12)
        # no returned point may beat the exhaustive front
        assert any(q.f <= p.f + 1e-9 and q.g <= p.g + 1e-9 for q in exact)
    for i, a in enumerate(report.front.points):
        for j, b in enumerate(report.front.points):
            if i != j:
                assert not (a.f <= b.f and a.g <= b.g
                            and (a.f < b.f or a.g < b.g))


def test_solve_records_counts_timings_and_config(fast_backend):
    inst = random_instance(8, n=4, m=2)
    report = solve(inst, segments=2, backend=fast_backend, seed=1,
                   exact_bounds=True)
    assert report.variable_counts["compact"] == 4 * 4 + 2
    assert report.variable_counts["padded"] >= 4 * 4
    assert set(report.timings) == {"bounds", "bands", "filter", "total"}
    assert report.config["segments"] == 2
    assert report.config["backend"] == "local"
    assert len(report.bands) == 2


def test_solve_parallel_jobs_match_serial(fast_backend):
    inst = random_instance(31, n=4, m=3)
    serial = solve(inst, segments=3, backend=fast_backend, seed=9,
                   exact_bounds=True, jobs=1)
    parallel = solve(inst, segments=3, backend=fast_backend, seed=9,
                     exact_bounds=True, jobs=3)
    assert serial.front.objectives() == parallel.front.objectives()


def test_solve_report_dict_shape(fast_backend):
    inst = random_instance(8, n=4, m=2)
    report = solve(inst, segments=2, backend=fast_backend, seed=1,
                   exact_bounds=True)
    doc = report.to_dict()
    assert doc["instance"] == inst.name
    assert len(doc["schedule"]["levels"]) == 3
    for band_doc in doc["bands"]:
        assert {"index", "band", "feasible", "iterations"} <= band_doc.keys()
    for point in doc["front"]:
        assert point["tour"][0] == 1  # city numbering is 1-based outside
        assert {"f", "g", "picked"} <= point.keys()


def test_solve_validation(fast_backend):
    inst = random_instance(8, n=4, m=2)
    with pytest.raises(SolverConfigError, match="segment"):
        solve(inst, segments=0, backend=fast_backend)
    with pytest.raises(SolverConfigError, match="jobs"):
        solve(inst, segments=1, jobs=0, backend=fast_backend)
