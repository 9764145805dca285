"""Pipeline orchestration: profit bounds, band schedule, per-band
alternating sample/refine/divisor-update loops, and the final front.

Each band is an independent subproblem restricted to a profit slice. Within
a band the loop alternates annealing the fixed-divisor encoding, refining
the best feasible sample's picking plan, and re-deriving the divisors from
the refined solution; it stops when an iterate fails to strictly improve
the incumbent travel time. The union of every band's accepted iterates is
Pareto-filtered into the returned front.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cqm import LocalBackend, mix_seed
from .encoder import VariableLayout, decode, encode_profit_bound, encode_subproblem
from .instance import TtpInstance
from .lea import lea_refine
from .model import OverweightError, Solution, is_feasible
from .pareto import ObjectivePoint, ParetoFront, filter_nondominated

__all__ = [
    "SolverConfigError",
    "EpsilonSchedule",
    "BandResult",
    "SolveReport",
    "fractional_travel_time",
    "compute_bounds",
    "make_schedule",
    "update_b",
    "solve_band",
    "solve",
]


class SolverConfigError(ValueError):
    pass


def fractional_travel_time(instance: TtpInstance, solution: Solution, b) -> float:
    """Travel objective with fixed per-position divisors: each leg costs
    capacity * distance / b[departure position]."""
    b = np.asarray(b, dtype=float)
    legs = instance.distance[solution.tour, np.roll(solution.tour, -1)]
    return float(np.sum(instance.capacity * legs / b))


def update_b(instance: TtpInstance, solution: Solution) -> np.ndarray:
    """Divisors implied by a solution's own load profile. Plugging them back
    into :func:`fractional_travel_time` reproduces the true travel time, and
    they can only shrink across improving iterations."""
    cum = solution.cumulative
    if cum[-1] > instance.capacity:
        raise OverweightError(
            f"picked weight {cum[-1]} exceeds capacity {instance.capacity}"
        )
    span = instance.v_max - instance.v_min
    return instance.capacity * instance.v_max - cum * span


def _knapsack_max_profit(weights: np.ndarray, profits: np.ndarray,
                         capacity: int) -> float:
    dp = np.zeros(capacity + 1)
    for w, p in zip(weights, profits):
        w = int(w)
        if 0 < w <= capacity:
            np.maximum(dp[w:], dp[:-w] + p, out=dp[w:])
    return float(dp[-1])


def compute_bounds(
    instance: TtpInstance,
    backend=None,
    *,
    exact: bool = False,
    seed: int | None = None,
) -> tuple[float, float]:
    """Profit-objective range (g_min, g_max) for the band schedule.

    g_max is always 0 (pick nothing). g_min is the negated best knapsack
    profit: exact via dynamic programming when ``exact`` is set (integer
    weights required), otherwise the best feasible annealed sample, which
    upper-bounds the true minimum. A degenerate (0, 0) result on an
    instance that has items triggers a warning instead of an error.
    """
    if instance.num_items == 0:
        return (0.0, 0.0)
    if exact:
        weights = instance.weights
        if not np.allclose(weights, np.round(weights), atol=1e-9):
            raise SolverConfigError(
                "exact profit bounds need integer item weights"
            )
        cap = int(math.floor(instance.capacity + 1e-9))
        opt = _knapsack_max_profit(np.round(weights).astype(np.int64),
                                   instance.profits, cap)
        g_min = -opt
    else:
        backend = backend or LocalBackend()
        model = encode_profit_bound(instance)
        sample_set = backend.sample_cqm(model, seed=seed)
        best = sample_set.first_feasible()
        if best is None:
            warnings.warn(
                "no feasible profit-bound sample; falling back to an empty "
                "plan and a degenerate schedule"
            )
            return (0.0, 0.0)
        g_min = min(0.0, model.objective_value(best.assignment))
    if g_min == 0.0:
        warnings.warn("profit bound came out empty; schedule is degenerate")
    return (float(g_min), 0.0)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Band edges over the profit-objective spectrum: levels[s] through
    levels[s+1] bound band s inclusively, with both endpoints pinned."""

    g_min: float
    g_max: float
    segments: int
    mode: str
    levels: np.ndarray

    def band(self, s: int) -> tuple[float, float]:
        if not (0 <= s < self.segments):
            raise SolverConfigError(f"band index {s} out of range")
        return (float(self.levels[s]), float(self.levels[s + 1]))


def make_schedule(
    g_min: float,
    g_max: float,
    segments: int,
    mode: str = "equal",
    seed: int = 0,
) -> EpsilonSchedule:
    """Equal mode places level s at g_min + s * (g_max - g_min) / segments
    exactly; random mode draws the interior levels uniformly and sorts. The
    last level is pinned to g_max either way."""
    if segments < 1:
        raise SolverConfigError("need at least one segment")
    if g_min > g_max:
        raise SolverConfigError(f"g_min {g_min} exceeds g_max {g_max}")
    if g_max > 0:
        raise SolverConfigError(f"g_max must be <= 0, got {g_max}")
    if mode == "equal":
        levels = np.array(
            [g_min + s * (g_max - g_min) / segments for s in range(segments)]
            + [g_max]
        )
    elif mode == "random":
        rng = np.random.default_rng(seed)
        interior = np.sort(rng.uniform(0.0, 1.0, segments - 1))
        levels = np.concatenate(
            ([g_min], g_min + interior * (g_max - g_min), [g_max])
        )
    else:
        raise SolverConfigError(f"unknown schedule mode {mode!r}")
    levels.flags.writeable = False
    return EpsilonSchedule(g_min=float(g_min), g_max=float(g_max),
                           segments=segments, mode=mode, levels=levels)


@dataclass
class BandResult:
    """Outcome of one band: ``solution`` is None when no feasible sample
    ever appeared (the band is skipped, not an error). ``accepted`` is the
    strictly improving incumbent trace; ``candidates`` holds every feasible
    solution identified along the way (decoded samples and refinement
    intermediates), kept so the final non-dominated filter sees all of
    them."""

    index: int
    band: tuple[float, float]
    solution: Solution | None
    iterations: int
    f_trace: list[float] = field(default_factory=list)
    accepted: list[Solution] = field(default_factory=list)
    candidates: list[Solution] = field(default_factory=list)
    sampler_info: list[dict] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def solve_band(
    instance: TtpInstance,
    band: tuple[float, float],
    backend=None,
    *,
    t_max: int = 5,
    seed: int = 0,
    index: int = 0,
    legacy_break: bool = False,
    sample_pool: int = 8,
) -> BandResult:
    """Alternate sampling, refinement, and divisor updates inside one band.

    Divisors start at all-ones (the loosest admissible setting). The
    default termination accepts strict travel-time improvements and stops
    on the first non-improving iterate, returning the best feasible
    solution observed. Sampling rounds that yield nothing feasible are
    retried with fresh seeds until the iteration budget runs out. Up to
    ``sample_pool`` distinct feasible samples per iteration are decoded
    into the candidate pool (they often land on different profit levels
    inside the band). ``legacy_break`` switches to
    the loop-exit variant that stops as soon as an iterate improves on its
    immediate predecessor and keeps that predecessor; it exists for study,
    not for quality.
    """
    if t_max < 1:
        raise SolverConfigError("t_max must be >= 1")
    backend = backend or LocalBackend()
    b = np.ones(instance.num_cities)
    result = BandResult(index=index, band=(float(band[0]), float(band[1])),
                        solution=None, iterations=0)
    prev_f = math.inf
    for t in range(1, t_max + 1):
        result.iterations = t
        model = encode_subproblem(instance, band, b)
        sample_set = backend.sample_cqm(model, seed=mix_seed(seed, 0x5B, t))
        result.sampler_info.append(dict(sample_set.info))
        best = sample_set.first_feasible()
        if best is None:
            continue  # retry with a fresh seed; tight bands often need it
        decoded = decode(instance, best.assignment)
        if not is_feasible(instance, decoded, band):
            continue
        result.candidates.append(decoded)
        _pool_extra_samples(instance, band, sample_set, result.candidates,
                            sample_pool)
        refined = lea_refine(instance, decoded, band,
                             collect=result.candidates)
        result.f_trace.append(refined.f)
        if legacy_break:
            if t > 1 and refined.f < prev_f:
                break  # keep the pre-improvement iterate
            result.solution = refined
            result.accepted.append(refined)
            prev_f = refined.f
            b = update_b(instance, refined)
            continue
        if result.solution is None or refined.f < result.solution.f:
            result.solution = refined
            result.accepted.append(refined)
            b = update_b(instance, refined)
        else:
            break
    return result


def _pool_extra_samples(instance, band, sample_set, candidates, limit):
    """Decode up to ``limit`` further distinct feasible samples into the
    candidate pool (they often land on different profit levels inside the
    band)."""
    if limit <= 0:
        return
    seen = set()
    taken = 0
    for sample in sample_set:
        if not sample.feasible or taken >= limit:
            break  # samples are sorted feasible-first
        key = sample.assignment.tobytes()
        if key in seen:
            continue
        seen.add(key)
        decoded = decode(instance, sample.assignment)
        if is_feasible(instance, decoded, band):
            candidates.append(decoded)
            taken += 1


@dataclass
class SolveReport:
    instance_name: str
    bounds: tuple[float, float]
    schedule: EpsilonSchedule
    bands: list[BandResult]
    front: ParetoFront
    variable_counts: dict
    timings: dict
    config: dict

    def to_dict(self, include_solutions: bool = True) -> dict:
        def solution_doc(sol: Solution) -> dict:
            return {
                "tour": [int(c) + 1 for c in sol.tour],
                "picked": sol.picked_ids(),
                "f": sol.f,
                "g": sol.g,
            }

        bands = []
        for br in self.bands:
            doc = {
                "index": br.index,
                "band": [br.band[0], br.band[1]],
                "feasible": br.feasible,
                "iterations": br.iterations,
                "f_trace": list(br.f_trace),
            }
            if br.feasible and include_solutions:
                doc["solution"] = solution_doc(br.solution)
            bands.append(doc)
        front = []
        for point in self.front.points:
            doc = {"f": point.f, "g": point.g}
            if point.solution is not None and include_solutions:
                doc.update(solution_doc(point.solution))
            front.append(doc)
        return {
            "instance": self.instance_name,
            "bounds": [self.bounds[0], self.bounds[1]],
            "schedule": {
                "mode": self.schedule.mode,
                "segments": self.schedule.segments,
                "levels": [float(v) for v in self.schedule.levels],
            },
            "bands": bands,
            "front": front,
            "variable_counts": dict(self.variable_counts),
            "timings": dict(self.timings),
            "config": dict(self.config),
        }


def solve(
    instance: TtpInstance,
    *,
    segments: int = 10,
    mode: str = "equal",
    backend=None,
    seed: int = 0,
    t_max: int = 5,
    exact_bounds: bool = False,
    jobs: int = 1,
    legacy_break: bool = False,
    sample_pool: int = 8,
) -> SolveReport:
    """Full pipeline: bounds, schedule, every band, Pareto filter.

    Deterministic for a fixed seed and local backend regardless of ``jobs``
    (per-band seeds are derived up front and results are merged in band
    order). Per-band infeasibility is recorded in the report, never raised.
    """
    if segments < 1:
        raise SolverConfigError("need at least one segment")
    if jobs < 1:
        raise SolverConfigError("jobs must be >= 1")
    backend = backend or LocalBackend()
    t_start = time.perf_counter()
    g_min, g_max = compute_bounds(
        instance, backend, exact=exact_bounds, seed=mix_seed(seed, 0xB0)
    )
    t_bounds = time.perf_counter()
    schedule = make_schedule(g_min, g_max, segments, mode=mode,
                             seed=mix_seed(seed, 0x5C))
    band_seeds = [mix_seed(seed, 0xBA, s) for s in range(segments)]

    def run(s: int) -> BandResult:
        return solve_band(
            instance, schedule.band(s), backend,
            t_max=t_max, seed=band_seeds[s], index=s,
            legacy_break=legacy_break, sample_pool=sample_pool,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            bands = list(pool.map(run, range(segments)))
    else:
        bands = [run(s) for s in range(segments)]
    t_bands = time.perf_counter()

    pool_points = [
        ObjectivePoint(sol.f, sol.g, solution=sol)
        for br in bands
        for sol in (*br.accepted, *br.candidates)
    ]
    front = filter_nondominated(pool_points)
    layout = VariableLayout.from_instance(instance)
    t_end = time.perf_counter()
    return SolveReport(
        instance_name=instance.name,
        bounds=(g_min, g_max),
        schedule=schedule,
        bands=bands,
        front=front,
        variable_counts={
            "compact": layout.total_vars,
            "padded": layout.padded_total_vars,
        },
        timings={
            "bounds": t_bounds - t_start,
            "bands": t_bands - t_bounds,
            "filter": t_end - t_bands,
            "total": t_end - t_start,
        },
        config={
            "segments": segments,
            "mode": mode,
            "seed": seed,
            "t_max": t_max,
            "exact_bounds": exact_bounds,
            "jobs": jobs,
            "legacy_break": legacy_break,
            "backend": getattr(backend, "kind", "custom"),
        },
    )
