"""Reference solvers for verification on small instances.

None of these are meant for scale: ``brute_force`` tries every (not necessarily
monotone) interval assignment, ``algorithm1`` every monotone partition solved
from scratch, and ``brute_force_integer`` every integer point. ``greedy_feasible``
builds a feasible point directly for the instance classes where that is easy.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .exceptions import CapExceededError, NonIntegralDataError, NotCoveredError
from .instance import ConvexObjective, Instance, case_flags, eval_objective, isclose
from .simple_rap import solve_box
from .sweep import BestTracker, Solution, SolveStatus

DEFAULT_CAP = 10**6


def _solve_assignments(inst, objective, assignments, partition_of):
    objective = ConvexObjective.parse(objective)
    R = inst.R
    best = BestTracker()
    xs = {}
    for a in assignments:
        lo, hi = inst.interval_bounds(a)
        slo, shi = float(lo.sum()), float(hi.sum())
        if (slo > R and not isclose(slo, R)) or (shi < R and not isclose(shi, R)):
            continue
        x, res = solve_box(lo, hi, inst.b, R)
        if x is None:
            continue
        key = partition_of(a)
        xs[key] = x
        best.offer(eval_objective(inst, objective, x), key, res.lam)
    top = best.best()
    if top is None:
        return Solution(None, math.nan, (), math.inf, SolveStatus.INFEASIBLE)
    V, key, lam = top
    return Solution(xs[key], lam, key, V, SolveStatus.OPTIMAL)


def brute_force(inst: Instance, objective=ConvexObjective.QUADRATIC, cap=DEFAULT_CAP) -> Solution:
    """Best over all ``m**n`` interval assignments; ``partition`` is the assignment."""
    if inst.m ** inst.n > cap:
        raise CapExceededError(f"m**n = {inst.m ** inst.n} exceeds cap {cap}")
    assignments = itertools.product(range(inst.m), repeat=inst.n)
    return _solve_assignments(inst, objective, assignments, tuple)


def monotone_partitions(n: int, m: int):
    return itertools.combinations_with_replacement(range(n + 1), m - 1)


def algorithm1(inst: Instance, objective=ConvexObjective.QUADRATIC, cap=DEFAULT_CAP) -> Solution:
    """Best over all monotone partitions, each solved independently."""
    count = math.comb(inst.n + inst.m - 1, inst.m - 1)
    if count > cap:
        raise CapExceededError(f"{count} partitions exceed cap {cap}")
    n = inst.n
    by_assignment = {}
    for K in monotone_partitions(n, inst.m):
        a = tuple(int(v) for v in np.searchsorted(np.asarray(K, dtype=np.int64), np.arange(n), side="right"))
        by_assignment[a] = K
    return _solve_assignments(inst, objective, list(by_assignment), by_assignment.__getitem__)


def _integer_values(inst: Instance, i: int) -> np.ndarray:
    vals = [np.arange(inst.lower(i, j), inst.upper(i, j) + 1) for j in range(inst.m)]
    return np.concatenate(vals)


def brute_force_integer(inst: Instance, objective=ConvexObjective.QUADRATIC, cap=DEFAULT_CAP) -> Solution:
    """Exhaustive search over all integer points; ties go to the lexicographically first."""
    if not inst.integer:
        raise NonIntegralDataError("brute_force_integer needs integer data")
    objective = ConvexObjective.parse(objective)
    choices = [_integer_values(inst, i) for i in range(inst.n)]
    total = math.prod(len(c) for c in choices)
    if total > cap:
        raise CapExceededError(f"{total} integer points exceed cap {cap}")
    grid = np.stack(np.meshgrid(*choices, indexing="ij"), axis=-1).reshape(-1, inst.n)
    grid = grid[grid.sum(axis=1) == inst.R]
    if grid.shape[0] == 0:
        return Solution(None, math.nan, (), math.inf, SolveStatus.INFEASIBLE)
    values = objective(grid + inst.b).sum(axis=1)
    k = int(np.argmin(values))
    x = grid[k].astype(np.int64)
    return Solution(x, math.nan, (), float(values[k]), SolveStatus.OPTIMAL)


# --- greedy feasibility -------------------------------------------------------------

def _greedy_fill(inst: Instance) -> np.ndarray:
    """Largest-first fill: each variable takes as much as the rest can spare."""
    fl, lu = inst.first_lower, inst.last_upper
    rest_lower = np.concatenate([np.cumsum(fl[::-1])[::-1][1:], [0.0]])
    y = np.empty(inst.n)
    used = 0.0
    for i in range(inst.n):
        y[i] = max(fl[i], min(lu[i], inst.R - used - rest_lower[i]))
        used += y[i]
    return y


def _gap_index(inst: Instance, y):
    """``(s, j)`` with ``y[s]`` strictly between intervals ``j`` and ``j + 1``, or None."""
    sl, su = inst.shared_lower, inst.shared_upper
    for s, v in enumerate(y):
        for j in range(inst.m - 1):
            if su[j] < v < sl[j]:
                return s, j
    return None


def _fill_interval(inst: Instance, lo, hi):
    """Point with every coordinate at the same fraction of its box ``[lo, hi]``."""
    width = float(np.sum(hi - lo))
    if width <= 0:
        return lo.astype(float).copy()
    return lo + (hi - lo) * ((inst.R - float(lo.sum())) / width)


def greedy_feasible(inst: Instance) -> np.ndarray:
    """A feasible point by the greedy fill plus a one-variable repair.

    Covered, for a canonical instance with
    ``sum(first_lower) <= R <= sum(last_upper)``:

    * (F1,L2) when ``R <= n * su[0]`` or ``R >= sl[-1] + sum(first_lower[1:])``;
    * (F2,L1) when ``R >= n * sl[-1]`` or ``R <= sum(last_upper[:-1]) + su[0]``;
    * (F2,L2) always when ``n >= 2`` (either of the two conditions above holds).

    Raises :class:`NotCoveredError` otherwise.
    """
    n, m, R = inst.n, inst.m, inst.R
    fl, lu = inst.first_lower, inst.last_upper
    if not (fl.sum() <= R <= lu.sum()):
        raise NotCoveredError("R lies outside [sum of first lowers, sum of last uppers]")
    y = _greedy_fill(inst)
    hit = _gap_index(inst, y)
    if hit is None:
        return y
    s, j = hit
    flags = case_flags(inst)
    sl, su = inst.shared_lower, inst.shared_upper

    if flags.l2 and R >= sl[-1] + fl[1:].sum():
        # var 0 sits in its last interval with room to give up one gap
        x = y.copy()
        delta = sl[j] - x[s]
        x[s] = sl[j]
        x[0] -= delta
        return x
    if flags.f2 and R <= lu[:-1].sum() + su[0]:
        # var n-1 sits at its first lower bound with room to absorb one gap
        x = y.copy()
        delta = x[s] - su[j]
        x[s] = su[j]
        x[-1] += delta
        return x
    if R <= n * su[0]:
        return _fill_interval(inst, fl, np.full(n, su[0]))
    if R >= n * sl[-1]:
        return _fill_interval(inst, np.full(n, sl[-1]), lu)
    raise NotCoveredError(f"no greedy construction applies (cases {flags.cases()}, R={R})")
