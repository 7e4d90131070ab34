"""Separable convex resource allocation with disjoint interval bound constraints.

Minimize ``sum(phi(x_i + b_i))`` subject to ``sum(x_i) = R`` where every ``x_i``
lies in one of ``m`` disjoint intervals, for quadratic, absolute-value and hinge
``phi``, with continuous or integer variables.
"""

from .exceptions import (
    CapExceededError,
    GapError,
    GenerationFailedError,
    InfeasibleDemandError,
    InstanceError,
    LengthMismatchError,
    MalformedIntervalError,
    NonIntegralDataError,
    NotAdmissibleError,
    NotCanonicalError,
    NotCoveredError,
    RapError,
)
from .generators import (
    EvGenConfig,
    SyntheticGenConfig,
    counterexample_instance,
    gen_ev,
    gen_synthetic,
    random_instance,
)
from .instance import (
    CaseFlags,
    ConvexObjective,
    Instance,
    canonicalize,
    case_flags,
    eval_objective,
    interval_of,
    is_feasible,
    load_instance,
    save_instance,
    validate,
)
from .integer import integer_reconstruct, integer_value, solve_integer
from .oracle import algorithm1, brute_force, brute_force_integer, greedy_feasible
from .simple_rap import BookkeepingState, advance, init_state, solve_box
from .solver import solve_instance
from .sweep import Solution, SolveStatus, shift_partition, solve

__all__ = [name for name in dir() if not name.startswith("_")]
