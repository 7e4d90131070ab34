"""Integer-valued variables: rounding the continuous multiplier per partition.

For integer data the continuous optimum of a partition has its free variables at
``lam - b_i``. Their fractional parts add up to ``N_F * (lam - floor(lam))``,
an integer, so giving the first that many free variables (in canonical order)
the ceiling and the rest the floor yields an integer point with the same sum.
It is optimal for the integer partition problem, and its objective follows
directly from the bookkeeping values, so partitions can be scored during the
sweep at no extra cost.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import NonIntegralDataError
from .instance import REL_TOL, ConvexObjective, Instance, validate
from .simple_rap import reconstruct_bounds
from .sweep import Solution, _finish, sweep


def rounding_count(lam: float, n_free: int, n: int | None = None) -> int:
    """Number of free variables that are rounded up."""
    q = n_free * (lam - math.floor(lam))
    k = round(q)
    guard = (n if n is not None else max(n_free, 1)) * REL_TOL * max(1.0, abs(lam))
    if abs(q - k) > guard:
        raise NonIntegralDataError(
            f"N_F * frac(lam) = {q!r} is not integral; is the instance integer?"
        )
    return min(max(k, 0), n_free)


def integer_value(lam: float, V_B: float, N_F: int, objective, n: int | None = None) -> float:
    phi = ConvexObjective.parse(objective).scalar
    up = rounding_count(lam, N_F, n)
    fl = math.floor(lam)
    value = V_B
    if up:
        value += up * phi(float(math.ceil(lam)))
    if N_F - up:
        value += (N_F - up) * phi(float(fl))
    return value


def integer_reconstruct(inst: Instance, K, lam: float) -> np.ndarray:
    """Integer point for partition ``K`` built from its continuous multiplier."""
    lo, hi = inst.partition_bounds(K)
    x = reconstruct_bounds(lo, hi, inst.b, lam)
    free = np.nonzero((x > lo) & (x < hi))[0]
    up = rounding_count(lam, len(free), inst.n)
    out = np.rint(x)
    out[free[:up]] = math.ceil(lam) - inst.b[free[:up]]
    out[free[up:]] = math.floor(lam) - inst.b[free[up:]]
    out = out.astype(np.int64)
    total = int(out.sum())
    if total != int(round(inst.R)):
        raise NonIntegralDataError(f"rounded point sums to {total}, expected {inst.R}")
    return out


def integer_score(res, state, n):
    return integer_value(res.lam, state.V_B, state.N_F, state.objective, n=n)


def solve_integer(inst: Instance, objective=ConvexObjective.QUADRATIC, *, workers=None,
                  keep_log=False) -> Solution:
    """Optimal integer solution of a canonical, admissible integer instance."""
    if not inst.integer:
        raise NonIntegralDataError("solve_integer needs an instance flagged integer")
    validate(inst)
    objective = ConvexObjective.parse(objective)
    best, rec = sweep(inst, objective, score=integer_score, workers=workers, keep_log=keep_log)
    return _finish(inst, objective, best, rec, integer_reconstruct)
