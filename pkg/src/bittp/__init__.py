"""Bi-objective traveling-thief pipeline: profit-band scheduling over an
annealed quadratic encoding, with exact evaluation and Pareto tooling."""

from ._kernels import KERNEL
from .cqm import (
    AnnealParams,
    CalibrationParams,
    CqmModel,
    IsingModel,
    LocalBackend,
    SampleSet,
    anneal,
    lower_to_qubo,
    qubo_from_ising,
    solve_cqm,
)
from .encoder import (
    VariableLayout,
    decode,
    encode_profit_bound,
    encode_subproblem,
    encode_weighted_sum,
)
from .instance import (
    InstanceError,
    Item,
    ParseError,
    TtpInstance,
    build_instance,
    instance_from_json,
    load_instance,
    parse_instance,
    serialize_instance,
)
from .lea import lea_refine
from .model import (
    InvalidTourError,
    OverweightError,
    Solution,
    is_feasible,
    make_solution,
    profit_objective,
    travel_time,
)
from .oracle import exhaustive_front, iter_feasible_solutions
from .pareto import (
    ObjectivePoint,
    ParetoFront,
    dominates,
    filter_nondominated,
    hypervolume,
    normalization_bounds,
)
from .remote import RemoteBackend
from .solver import (
    EpsilonSchedule,
    SolveReport,
    compute_bounds,
    fractional_travel_time,
    make_schedule,
    solve,
    solve_band,
    update_b,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL",
    "__version__",
    "TtpInstance",
    "Item",
    "InstanceError",
    "ParseError",
    "parse_instance",
    "build_instance",
    "load_instance",
    "instance_from_json",
    "serialize_instance",
    "Solution",
    "make_solution",
    "travel_time",
    "profit_objective",
    "is_feasible",
    "OverweightError",
    "InvalidTourError",
    "CqmModel",
    "IsingModel",
    "SampleSet",
    "AnnealParams",
    "CalibrationParams",
    "qubo_from_ising",
    "lower_to_qubo",
    "anneal",
    "solve_cqm",
    "LocalBackend",
    "RemoteBackend",
    "VariableLayout",
    "encode_subproblem",
    "encode_profit_bound",
    "encode_weighted_sum",
    "decode",
    "lea_refine",
    "EpsilonSchedule",
    "SolveReport",
    "compute_bounds",
    "make_schedule",
    "update_b",
    "solve_band",
    "solve",
    "fractional_travel_time",
    "ObjectivePoint",
    "ParetoFront",
    "dominates",
    "filter_nondominated",
    "normalization_bounds",
    "hypervolume",
    "exhaustive_front",
    "iter_feasible_solutions",
]
