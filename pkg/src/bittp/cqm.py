"""Constrained quadratic models over binary variables and their annealing.

A :class:`CqmModel` carries a sparse quadratic objective plus bounded
linear/quadratic constraints. ``lower_to_qubo`` turns it into a genuine
unconstrained QUBO: inequality gaps are encoded with binary-expanded integer
slack variables, and quadratic constraint terms are first substituted by
product variables (with their consistency penalties) so that squaring the
violation stays quadratic. ``solve_cqm`` anneals the lowered form and
escalates penalty weights until the best sample is feasible under the exact
constraint check (never the penalty energies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from ._kernels.pure import _next_u64

__all__ = [
    "CqmError",
    "Constraint",
    "CqmModel",
    "IsingModel",
    "qubo_from_ising",
    "LoweredQubo",
    "lower_to_qubo",
    "Sample",
    "SampleSet",
    "AnnealParams",
    "CalibrationParams",
    "anneal",
    "solve_cqm",
    "LocalBackend",
    "mix_seed",
]

_MASK = (1 << 64) - 1
SENSES = ("<=", ">=", "==")


class CqmError(ValueError):
    pass


def mix_seed(*parts: int) -> int:
    """Deterministically combine integers into a 64-bit seed."""
    state = 0x8A5CD789635D2DFF
    for p in parts:
        state ^= int(p) & _MASK
        state, _ = _next_u64(state)
    _, out = _next_u64(state)
    return out


def _canon(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _expr_value(linear: Mapping[int, float],
                quadratic: Mapping[tuple[int, int], float],
                x: np.ndarray) -> float:
    total = 0.0
    for i, c in linear.items():
        if x[i]:
            total += c
    for (i, j), c in quadratic.items():
        if x[i] and x[j]:
            total += c
    return total


@dataclass(frozen=True)
class Constraint:
    """Sparse linear+quadratic expression compared against a bound."""

    linear: dict[int, float]
    quadratic: dict[tuple[int, int], float]
    sense: str
    bound: float
    label: str

    def __post_init__(self):
        if not self.linear and not self.quadratic:
            raise CqmError(f"constraint {self.label!r} has an empty expression")
        if self.sense not in SENSES:
            raise CqmError(f"unknown sense {self.sense!r}")

    def value(self, x: np.ndarray) -> float:
        return _expr_value(self.linear, self.quadratic, x)

    def satisfied(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        v = self.value(x)
        t = tol * max(1.0, abs(self.bound))
        if self.sense == "<=":
            return v <= self.bound + t
        if self.sense == ">=":
            return v >= self.bound - t
        return abs(v - self.bound) <= t

    def variables(self) -> set[int]:
        out = set(self.linear)
        for i, j in self.quadratic:
            out.add(i)
            out.add(j)
        return out


class CqmModel:
    """Binary quadratic objective plus constraints.

    Quadratic keys are canonical (i < j); self-pairs fold into the linear
    part since x^2 = x for binaries. Models are built once and then treated
    as immutable.
    """

    def __init__(self, num_vars: int):
        if num_vars < 0:
            raise CqmError("num_vars must be non-negative")
        self.num_vars = num_vars
        self.objective_linear: dict[int, float] = {}
        self.objective_quadratic: dict[tuple[int, int], float] = {}
        self.offset = 0.0
        self.constraints: list[Constraint] = []

    def _check_var(self, i: int) -> None:
        if not (0 <= i < self.num_vars):
            raise CqmError(f"variable index {i} out of range [0, {self.num_vars})")

    def add_linear(self, i: int, coeff: float) -> None:
        self._check_var(i)
        self.objective_linear[i] = self.objective_linear.get(i, 0.0) + coeff

    def add_quadratic(self, i: int, j: int, coeff: float) -> None:
        self._check_var(i)
        self._check_var(j)
        if i == j:
            self.add_linear(i, coeff)
            return
        key = _canon(i, j)
        self.objective_quadratic[key] = self.objective_quadratic.get(key, 0.0) + coeff

    def add_constraint(
        self,
        linear: Mapping[int, float] | None = None,
        quadratic: Mapping[tuple[int, int], float] | None = None,
        *,
        sense: str,
        bound: float,
        label: str,
    ) -> None:
        lin: dict[int, float] = {}
        quad: dict[tuple[int, int], float] = {}
        for i, c in (linear or {}).items():
            self._check_var(i)
            if c:
                lin[i] = lin.get(i, 0.0) + c
        for (i, j), c in (quadratic or {}).items():
            self._check_var(i)
            self._check_var(j)
            if not c:
                continue
            if i == j:
                lin[i] = lin.get(i, 0.0) + c
            else:
                key = _canon(i, j)
                quad[key] = quad.get(key, 0.0) + c
        self.constraints.append(
            Constraint(linear=lin, quadratic=quad, sense=sense,
                       bound=float(bound), label=label)
        )

    def objective_value(self, x: np.ndarray) -> float:
        return self.offset + _expr_value(self.objective_linear,
                                         self.objective_quadratic, x)

    def check_feasible(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return all(c.satisfied(x, tol) for c in self.constraints)

    def violated_constraints(self, x: np.ndarray, tol: float = 1e-9) -> list[str]:
        return [c.label for c in self.constraints if not c.satisfied(x, tol)]

    def max_abs_objective_coeff(self) -> float:
        coeffs = [abs(c) for c in self.objective_linear.values()]
        coeffs += [abs(c) for c in self.objective_quadratic.values()]
        return max(coeffs) if coeffs else 0.0


@dataclass(frozen=True)
class IsingModel:
    """Spin model (sigma in {-1, +1}): biases h, couplings J, offset."""

    h: np.ndarray
    J: dict[tuple[int, int], float]
    offset: float = 0.0


def qubo_from_ising(ising: IsingModel) -> CqmModel:
    """Exact change of variables x = (sigma + 1) / 2.

    The returned unconstrained model has identical energy to the Ising model
    on every assignment under sigma = 2x - 1.
    """
    h = np.asarray(ising.h, dtype=float)
    n = h.shape[0]
    model = CqmModel(n)
    offset = float(ising.offset)
    for i in range(n):
        if h[i]:
            model.add_linear(i, 2.0 * h[i])
            offset -= h[i]
    for (i, j), coupling in ising.J.items():
        if i == j:
            offset += coupling  # sigma_i^2 == 1
            continue
        model.add_quadratic(i, j, 4.0 * coupling)
        model.add_linear(i, -2.0 * coupling)
        model.add_linear(j, -2.0 * coupling)
        offset += coupling
    model.offset = offset
    return model


def _is_integral(value: float, tol: float = 1e-9) -> bool:
    return abs(value - round(value)) <= tol


def _slack_weights(slack_range: int) -> list[int]:
    """Binary expansion with a capped top weight; sums cover [0, range]."""
    if slack_range <= 0:
        return []
    n_bits = int(slack_range).bit_length()
    if slack_range == (1 << n_bits) - 1:
        return [1 << k for k in range(n_bits)]
    weights = [1 << k for k in range(n_bits - 1)]
    weights.append(slack_range - ((1 << (n_bits - 1)) - 1))
    return weights


@dataclass
class _SlackEncoding:
    """One lowered inequality: normalized <=-form coefficients over kernel
    variables (active model and product), the (possibly integrally
    tightened) bound, and the appended slack bits."""

    constraint_index: int
    coeffs: dict[int, float]
    bound_eff: float
    slack_vars: list[int]
    slack_weights: list[int]
    is_equality: bool
    integral: bool


@dataclass
class LoweredQubo:
    """Unconstrained quadratic form produced by :func:`lower_to_qubo`.

    Kernel variables 0..num_active_model-1 are the model variables that
    survived presolve (in ``active_model`` order); product variables and
    slack bits are appended after. Variables pinned by presolve live in
    ``fixed_model`` and are restored by :meth:`expand`.
    """

    num_model_vars: int
    num_vars: int
    linear: np.ndarray
    quadratic: dict[tuple[int, int], float]
    offset: float
    encodings: list[_SlackEncoding]
    product_index: dict[tuple[int, int], int]
    num_active_model: int
    active_model: np.ndarray
    fixed_model: dict[int, int]
    # energy unit for the annealer's beta schedule; None = largest coefficient
    anneal_scale: float | None = None
    _csr: tuple | None = field(default=None, repr=False)

    def energy(self, x: np.ndarray) -> float:
        x = np.asarray(x)
        total = self.offset + float(self.linear[x.astype(bool)].sum())
        for (i, j), c in self.quadratic.items():
            if x[i] and x[j]:
                total += c
        return total

    def expand(self, x_kernel: np.ndarray) -> np.ndarray:
        """Model-variable assignment from a kernel read: scatter the active
        variables back to their model positions and fill in the pinned ones."""
        out = np.zeros(self.num_model_vars, dtype=np.uint8)
        if self.num_active_model:
            out[self.active_model] = np.asarray(
                x_kernel[: self.num_active_model], dtype=np.uint8
            )
        for v, val in self.fixed_model.items():
            out[v] = val
        return out

    def best_completion(self, x_kernel: np.ndarray) -> np.ndarray:
        """Extend a kernel read canonically: product variables take their
        true values and each slack takes the representable integer closest
        to the constraint gap."""
        full = np.zeros(self.num_vars, dtype=np.uint8)
        full[: self.num_active_model] = np.asarray(
            x_kernel[: self.num_active_model], dtype=np.uint8
        )
        for (i, j), y in self.product_index.items():
            full[y] = full[i] & full[j]
        for enc in self.encodings:
            if not enc.slack_vars:
                continue
            value = sum(c for v, c in enc.coeffs.items() if full[v])
            gap = enc.bound_eff - value
            total = sum(enc.slack_weights)
            target = min(max(int(round(gap)), 0), total)
            for v, w in zip(enc.slack_vars, self._decompose(target, enc.slack_weights)):
                full[v] = w
        return full

    @staticmethod
    def _decompose(target: int, weights: list[int]) -> list[int]:
        # weights = [1, 2, 4, ..., capped]; take the cap first when needed,
        # then binary-decompose the remainder.
        bits = [0] * len(weights)
        if not weights:
            return bits
        rem = target
        cap = weights[-1]
        if rem >= cap:
            bits[-1] = 1
            rem -= cap
        for k in range(len(weights) - 2, -1, -1):
            if rem >= weights[k]:
                bits[k] = 1
                rem -= weights[k]
        return bits

    def csr(self):
        """Symmetric CSR adjacency + dense linear array for the kernels."""
        if self._csr is None:
            n = self.num_vars
            neighbors: list[list[tuple[int, float]]] = [[] for _ in range(n)]
            for (i, j), c in self.quadratic.items():
                neighbors[i].append((j, c))
                neighbors[j].append((i, c))
            row_ptr = np.zeros(n + 1, dtype=np.int64)
            cols: list[int] = []
            vals: list[float] = []
            for i in range(n):
                neighbors[i].sort()
                row_ptr[i + 1] = row_ptr[i] + len(neighbors[i])
                for j, c in neighbors[i]:
                    cols.append(j)
                    vals.append(c)
            lin = np.zeros(n, dtype=np.float64)
            lin[: len(self.linear)] = self.linear
            self._csr = (
                row_ptr,
                np.asarray(cols, dtype=np.int64),
                np.asarray(vals, dtype=np.float64),
                lin,
            )
        return self._csr


def _substitute_fixed(
    lin: Mapping[int, float],
    quad: Mapping[tuple[int, int], float],
    fixed: Mapping[int, int],
) -> tuple[dict[int, float], dict[tuple[int, int], float], float]:
    """Fold pinned variables out of an expression. Returns (linear over the
    unpinned variables, quadratic over unpinned pairs, constant part)."""
    out_l: dict[int, float] = {}
    out_q: dict[tuple[int, int], float] = {}
    const = 0.0
    for i, c in lin.items():
        if i in fixed:
            const += c * fixed[i]
        else:
            out_l[i] = out_l.get(i, 0.0) + c
    for (i, j), c in quad.items():
        i_fixed = i in fixed
        j_fixed = j in fixed
        if i_fixed and j_fixed:
            const += c * fixed[i] * fixed[j]
        elif i_fixed:
            if fixed[i]:
                out_l[j] = out_l.get(j, 0.0) + c
        elif j_fixed:
            if fixed[j]:
                out_l[i] = out_l.get(i, 0.0) + c
        else:
            key = _canon(i, j)
            out_q[key] = out_q.get(key, 0.0) + c
    return out_l, out_q, const


def _forced_assignments(model: CqmModel) -> dict[int, int]:
    """Presolve: pin every binary whose other value would make one of its
    constraints unsatisfiable even under the best case of the remaining
    variables. Iterates to a fixed point, since each pin tightens the
    residual constraints. Only fully linear residuals are examined; a pin
    never excludes any feasible assignment."""
    fixed: dict[int, int] = {}
    changed = True
    while changed:
        changed = False
        for c in model.constraints:
            lin, quad, const = _substitute_fixed(c.linear, c.quadratic, fixed)
            if quad:
                continue
            lin = {i: a for i, a in lin.items() if a}
            if not lin:
                continue
            bound = c.bound - const
            tol = 1e-9 * max(1.0, abs(c.bound))
            senses = []
            if c.sense in ("<=", "=="):
                senses.append(1.0)
            if c.sense in (">=", "=="):
                senses.append(-1.0)
            for sign in senses:
                b = sign * bound
                lo = sum(min(0.0, sign * a) for a in lin.values())
                headroom = b - lo
                # A pin always lands on the value reaching lo, so the
                # headroom stays valid as pins accumulate within the pass.
                for i, a in lin.items():
                    if i in fixed:
                        continue
                    a = sign * a
                    if a > headroom + tol:
                        fixed[i] = 0
                        changed = True
                    elif -a > headroom + tol:
                        fixed[i] = 1
                        changed = True
    return fixed


def lower_to_qubo(model: CqmModel,
                  penalties: float | Sequence[float]) -> LoweredQubo:
    """Penalty-lower a constrained model to a genuine QUBO.

    Variables pinned by presolve (:func:`_forced_assignments`) are folded
    out first; the annealer never sees them. Each surviving inequality
    ``expr <= b`` becomes ``lam * (expr + s - b)**2`` with a binary-expanded
    integer slack ``s``; equalities drop the slack. When all coefficients of
    a constraint are integral the bound is tightened to the nearest
    satisfiable integer so every feasible gap is exactly representable (for
    non-integral coefficients the slack is a best integer approximation;
    exact feasibility is always re-checked on the original constraints).
    Quadratic constraint terms are substituted by product variables enforced
    with their own consistency penalties.
    """
    num_c = len(model.constraints)
    if np.isscalar(penalties):
        lam = [float(penalties)] * num_c
    else:
        lam = [float(p) for p in penalties]
        if len(lam) != num_c:
            raise CqmError(f"expected {num_c} penalties, got {len(lam)}")
    if any(p <= 0 for p in lam):
        raise CqmError("penalties must be positive")

    fixed = _forced_assignments(model) if model.constraints else {}
    active = [v for v in range(model.num_vars) if v not in fixed]
    kernel_of = {v: k for k, v in enumerate(active)}
    num_active = len(active)

    # Residual constraint expressions over the surviving variables.
    residuals = []
    for c in model.constraints:
        lin, quad, const = _substitute_fixed(c.linear, c.quadratic, fixed)
        residuals.append((lin, quad, c.bound - const, c.sense == "=="))

    # Product variables for surviving quadratic constraint terms, shared
    # across constraints; appended immediately after the active variables.
    product_index: dict[tuple[int, int], int] = {}
    next_var = num_active
    for _, quad, _, _ in residuals:
        for i, j in quad:
            key = _canon(kernel_of[i], kernel_of[j])
            if key not in product_index:
                product_index[key] = next_var
                next_var += 1

    obj_lin, obj_quad, obj_const = _substitute_fixed(
        model.objective_linear, model.objective_quadratic, fixed
    )
    linear: dict[int, float] = {kernel_of[i]: c for i, c in obj_lin.items()}
    quadratic: dict[tuple[int, int], float] = {
        _canon(kernel_of[i], kernel_of[j]): c for (i, j), c in obj_quad.items()
    }
    offset = model.offset + obj_const

    def bump_linear(i: int, c: float) -> None:
        linear[i] = linear.get(i, 0.0) + c

    def bump_quad(i: int, j: int, c: float) -> None:
        if i == j:
            bump_linear(i, c)
            return
        key = _canon(i, j)
        quadratic[key] = quadratic.get(key, 0.0) + c

    encodings: list[_SlackEncoding] = []
    # accumulated lying incentive per product variable, for sizing its
    # consistency penalty
    product_pressure: dict[int, float] = {y: 0.0 for y in product_index.values()}
    used_lams: list[float] = []

    for ci, (res_lin, res_quad, res_bound, is_eq) in enumerate(residuals):
        sign = -1.0 if model.constraints[ci].sense == ">=" else 1.0
        coeffs: dict[int, float] = {}
        for i, c in res_lin.items():
            k = kernel_of[i]
            coeffs[k] = coeffs.get(k, 0.0) + sign * c
        for (i, j), c in res_quad.items():
            y = product_index[_canon(kernel_of[i], kernel_of[j])]
            coeffs[y] = coeffs.get(y, 0.0) + sign * c
        bound = sign * res_bound
        coeffs = {v: c for v, c in coeffs.items() if c}
        if not coeffs:
            continue
        lo = sum(min(0.0, c) for c in coeffs.values())
        hi = sum(max(0.0, c) for c in coeffs.values())
        integral = all(_is_integral(c) for c in coeffs.values())
        bound_eff = bound
        slack_weights: list[int] = []
        if is_eq:
            if hi < bound or lo > bound:
                pass  # unsatisfiable; the squared penalty simply never hits 0
        else:
            if hi <= bound:
                continue  # vacuous constraint, no penalty needed
            if integral:
                bound_eff = math.floor(bound + 1e-9)
            slack_range = bound_eff - lo
            if integral:
                slack_weights = _slack_weights(int(round(slack_range)))
            elif slack_range > 0:
                slack_weights = _slack_weights(math.ceil(slack_range))

        slack_vars = list(range(next_var, next_var + len(slack_weights)))
        next_var += len(slack_weights)
        enc = _SlackEncoding(
            constraint_index=ci,
            coeffs=coeffs,
            bound_eff=float(bound_eff),
            slack_vars=slack_vars,
            slack_weights=slack_weights,
            is_equality=is_eq,
            integral=integral,
        )
        encodings.append(enc)

        # lam * (sum a_v v + sum w_k s_k - bound_eff)^2 expanded over binaries
        terms = list(coeffs.items()) + [
            (v, float(w)) for v, w in zip(slack_vars, slack_weights)
        ]
        const = -float(bound_eff)
        weight = lam[ci]
        used_lams.append(weight)
        offset += weight * const * const
        for idx, (v, a) in enumerate(terms):
            bump_linear(v, weight * (a * a + 2.0 * a * const))
            for u, b in terms[idx + 1:]:
                bump_quad(v, u, weight * 2.0 * a * b)

        # A lying product shifts this constraint's expression by |a|. Sizing
        # the consistency penalty for the worst conceivable residual blows
        # the coefficient range past what one temperature schedule can
        # anneal, so size it for residuals near the feasible basin instead;
        # feasibility is exact-checked on the model variables either way.
        for v, a in coeffs.items():
            if v in product_pressure:
                product_pressure[v] = max(
                    product_pressure[v], weight * (1.0 + abs(a))
                )

    for (i, j), y in product_index.items():
        w = product_pressure[y] + 1.0
        bump_quad(i, j, w)
        bump_quad(i, y, -2.0 * w)
        bump_quad(j, y, -2.0 * w)
        bump_linear(y, 3.0 * w)

    lin_arr = np.zeros(next_var, dtype=np.float64)
    for i, c in linear.items():
        lin_arr[i] = c
    quadratic = {k: v for k, v in quadratic.items() if v}
    return LoweredQubo(
        num_model_vars=model.num_vars,
        num_vars=next_var,
        linear=lin_arr,
        quadratic=quadratic,
        offset=offset,
        encodings=encodings,
        product_index=product_index,
        num_active_model=num_active,
        active_model=np.asarray(active, dtype=np.int64),
        fixed_model=fixed,
        anneal_scale=min(used_lams) if used_lams else None,
    )


@dataclass(frozen=True)
class Sample:
    assignment: np.ndarray  # model variables only
    energy: float
    feasible: bool


class SampleSet:
    """Samples sorted by (feasible desc, energy asc); stable within ties."""

    def __init__(self, samples: Iterable[Sample], info: dict | None = None):
        ordered = sorted(
            enumerate(samples), key=lambda t: (not t[1].feasible, t[1].energy, t[0])
        )
        self.samples: tuple[Sample, ...] = tuple(s for _, s in ordered)
        self.info = info or {}

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def best(self) -> Sample:
        if not self.samples:
            raise CqmError("empty sample set")
        return self.samples[0]

    def first_feasible(self) -> Sample | None:
        best = self.samples[0] if self.samples else None
        return best if best is not None and best.feasible else None


@dataclass(frozen=True)
class AnnealParams:
    num_reads: int = 32
    sweeps: int = 2000
    beta_min: float = 0.1
    beta_max: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.num_reads <= 0 or self.sweeps <= 0:
            raise CqmError("num_reads and sweeps must be positive")
        if not (0 < self.beta_min < self.beta_max):
            raise CqmError("need 0 < beta_min < beta_max")


@dataclass(frozen=True)
class CalibrationParams:
    lambda_init_multiplier: float = 2.0
    escalation_factor: float = 10.0
    max_rounds: int = 4

    def __post_init__(self):
        if self.lambda_init_multiplier <= 0 or self.escalation_factor <= 1:
            raise CqmError("multiplier must be > 0 and escalation factor > 1")
        if self.max_rounds < 1:
            raise CqmError("max_rounds must be >= 1")


def _raw_anneal(lowered: LoweredQubo, params: AnnealParams) -> np.ndarray:
    if lowered.num_vars == 0:
        raise CqmError("cannot anneal an empty model")
    row_ptr, col_idx, values, linear = lowered.csr()
    # The beta schedule assumes unit-scale energies, so normalize the
    # coefficients (equivalent to rescaling temperature; reported energies
    # stay unscaled). For a penalty-lowered model the unit is the smallest
    # constraint penalty: every constraint must freeze by beta_max, and the
    # smallest penalty is the last to do so.
    if lowered.anneal_scale:
        scale = float(lowered.anneal_scale)
    else:
        scale = 1e-12
        if values.size:
            scale = max(scale, float(np.abs(values).max()))
        if linear.size:
            scale = max(scale, float(np.abs(linear).max()))
    if params.sweeps == 1:
        betas = np.array([params.beta_min])
    else:
        betas = np.geomspace(params.beta_min, params.beta_max, params.sweeps)
    seeds = np.array(
        [mix_seed(params.seed, r) for r in range(params.num_reads)],
        dtype=np.uint64,
    )
    return _kernels.run_reads(
        lowered.num_vars, row_ptr, col_idx, values / scale, linear / scale,
        np.ascontiguousarray(betas, dtype=np.float64), seeds,
    )


def anneal(qubo: LoweredQubo | CqmModel, params: AnnealParams) -> SampleSet:
    """Sample an unconstrained quadratic form with independent geometric-
    schedule single-flip Metropolis runs. Deterministic for a fixed seed.
    """
    if isinstance(qubo, CqmModel):
        if qubo.constraints:
            raise CqmError("anneal takes an unconstrained form; use solve_cqm")
        lowered = LoweredQubo(
            num_model_vars=qubo.num_vars,
            num_vars=qubo.num_vars,
            linear=_dense_linear(qubo),
            quadratic=dict(qubo.objective_quadratic),
            offset=qubo.offset,
            encodings=[],
            product_index={},
            num_active_model=qubo.num_vars,
            active_model=np.arange(qubo.num_vars, dtype=np.int64),
            fixed_model={},
        )
    else:
        lowered = qubo
    assignments = _raw_anneal(lowered, params)
    samples = [
        Sample(assignment=lowered.expand(a),
               energy=lowered.energy(a), feasible=True)
        for a in assignments
    ]
    return SampleSet(samples, info={"kernel": _kernels.KERNEL})


def _dense_linear(model: CqmModel) -> np.ndarray:
    arr = np.zeros(model.num_vars, dtype=np.float64)
    for i, c in model.objective_linear.items():
        arr[i] = c
    return arr


def initial_penalties(model: CqmModel, multiplier: float) -> list[float]:
    """Scale-aware starting penalties: multiplier x (max |objective coeff|,
    at least 1) x (variable count of the constraint)."""
    base = max(1.0, model.max_abs_objective_coeff())
    return [
        multiplier * base * max(1, len(c.variables())) for c in model.constraints
    ]


def solve_cqm(
    model: CqmModel,
    params: AnnealParams = AnnealParams(),
    calibration: CalibrationParams = CalibrationParams(),
) -> SampleSet:
    """Anneal the lowered model, escalating penalties while the best sample
    is infeasible (exact constraint check). Never raises on a still-
    infeasible final round; callers read the feasible flags."""
    if model.num_vars == 0:
        raise CqmError("cannot solve an empty model")
    if not model.constraints:
        return anneal(model, params)
    lam = initial_penalties(model, calibration.lambda_init_multiplier)
    sample_set = None
    for round_idx in range(calibration.max_rounds):
        lowered = lower_to_qubo(model, lam)
        if lowered.num_vars == 0:
            # presolve decided every variable; nothing left to anneal
            empty = np.zeros(0, dtype=np.uint8)
            x = lowered.expand(empty)
            sample = Sample(assignment=x, energy=lowered.energy(empty),
                            feasible=model.check_feasible(x))
            return SampleSet([sample], info={
                "kernel": _kernels.KERNEL,
                "rounds_used": round_idx + 1,
                "penalties": list(lam),
            })
        round_params = AnnealParams(
            num_reads=params.num_reads,
            sweeps=params.sweeps,
            beta_min=params.beta_min,
            beta_max=params.beta_max,
            seed=mix_seed(params.seed, 0xC0, round_idx),
        )
        assignments = _raw_anneal(lowered, round_params)
        samples = []
        for a in assignments:
            x = lowered.expand(a)
            full = lowered.best_completion(a)
            samples.append(
                Sample(assignment=x, energy=lowered.energy(full),
                       feasible=model.check_feasible(x))
            )
        sample_set = SampleSet(
            samples,
            info={
                "kernel": _kernels.KERNEL,
                "rounds_used": round_idx + 1,
                "penalties": list(lam),
            },
        )
        if sample_set.best().feasible:
            break
        lam = [p * calibration.escalation_factor for p in lam]
    return sample_set


class LocalBackend:
    """Default sampler backend: penalty lowering + simulated annealing."""

    kind = "local"

    def __init__(self, params: AnnealParams = AnnealParams(),
                 calibration: CalibrationParams = CalibrationParams()):
        self.params = params
        self.calibration = calibration

    def sample_cqm(self, model: CqmModel, seed: int | None = None) -> SampleSet:
        params = self.params
        if seed is not None:
            params = AnnealParams(
                num_reads=params.num_reads, sweeps=params.sweeps,
                beta_min=params.beta_min, beta_max=params.beta_max, seed=seed,
            )
        return solve_cqm(model, params, self.calibration)
