"""Sequential breakpoint search for a box-constrained simple RAP.

For fixed per-variable boxes ``[lo_i, hi_i]`` the quadratic Lagrangian relaxation
is solved by ``x_i(lam) = clip(lam - b_i, lo_i, hi_i)``. The search walks the
breakpoints ``alpha_i = lo_i + b_i`` and ``beta_i = hi_i + b_i`` in increasing
order while maintaining

* ``B``   -- sum of the bounds of variables clamped at a bound,
* ``F``   -- sum of ``b_i`` over free variables,
* ``N_F`` -- number of free variables,
* ``V_B`` -- sum of ``phi(bound + b_i)`` over clamped variables,

so that ``z(lam) = B + N_F * lam - F`` and the objective at the optimum is
``V_B + N_F * phi(lam)``.

A state is *settled at* ``lam`` when exactly the breakpoints with value
``<= lam`` have been consumed. :func:`advance` always leaves the state settled
at the multiplier it returns, which is what the partition sweep relies on when
it resumes the search for the next partition.
"""

from __future__ import annotations

import enum
import heapq
import math
from array import array
from dataclasses import dataclass

import numpy as np

from .instance import ABS_TOL, REL_TOL, ConvexObjective, Instance, assignment_of

LOWER = 0
UPPER = 1


class Status(enum.Enum):
    FOUND = "found"
    INFEASIBLE_LOW = "infeasible_low"
    INFEASIBLE_HIGH = "infeasible_high"


@dataclass(frozen=True)
class Breakpoint:
    value: float
    var: int
    kind: int  # LOWER or UPPER
    epoch: int


@dataclass(frozen=True)
class MultiplierResult:
    lam: float
    V: float
    status: Status

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND


class BookkeepingState:
    """Resumable search state.

    Breakpoints live in two places per kind. The ones present at construction
    are kept as a sorted run (compact arrays plus a read position), which is
    cheaper and more cache-friendly than a heap for large ``n``; breakpoints
    inserted later by the partition sweep go into a heap of
    ``(value, var, epoch)`` tuples. Entries are stale, and are skipped when
    they surface, once their epoch differs from ``self.epoch[var]`` (sorted-run
    entries carry epoch 0); this deletes the breakpoints of a variable whose box
    changed in O(1) without touching either structure.
    """

    __slots__ = (
        "b", "lower", "upper", "assignment", "phi", "objective", "epoch",
        "run_lower", "run_lower_var", "pos_lower", "run_upper", "run_upper_var", "pos_upper",
        "queue_lower", "queue_upper", "B", "F", "N_F", "V_B",
    )

    def __init__(self, lower, upper, b, objective: ConvexObjective, assignment=None):
        objective = ConvexObjective.parse(objective)
        self.objective = objective
        self.phi = phi = objective.scalar
        b_arr = np.asarray(b, dtype=float)
        lo_arr = np.asarray(lower, dtype=float)
        hi_arr = np.asarray(upper, dtype=float)
        self.b = b = b_arr.tolist()
        self.lower = lower = lo_arr.tolist()
        self.upper = hi_arr.tolist()
        n = len(b)
        self.assignment = list(assignment) if assignment is not None else [0] * n
        self.epoch = [0] * n
        for kind, bound in ((LOWER, lo_arr), (UPPER, hi_arr)):
            vals = bound + b_arr
            order = np.argsort(vals, kind="stable")
            run, run_var = array("d", vals[order].tobytes()), array("q", order.astype(np.int64).tobytes())
            if kind == LOWER:
                self.run_lower, self.run_lower_var, self.pos_lower = run, run_var, 0
            else:
                self.run_upper, self.run_upper_var, self.pos_upper = run, run_var, 0
        self.queue_lower = []
        self.queue_upper = []
        self.B = sum(lower)
        self.F = 0.0
        self.N_F = 0
        self.V_B = sum(phi(lower[i] + b[i]) for i in range(n))

    def live_breakpoints(self) -> list[Breakpoint]:
        """Sorted unconsumed, non-stale breakpoints."""
        ep = self.epoch
        out = []
        for kind, run, run_var, pos, heap in (
            (LOWER, self.run_lower, self.run_lower_var, self.pos_lower, self.queue_lower),
            (UPPER, self.run_upper, self.run_upper_var, self.pos_upper, self.queue_upper),
        ):
            out += [Breakpoint(run[k], run_var[k], kind, 0)
                    for k in range(pos, len(run)) if ep[run_var[k]] == 0]
            out += [Breakpoint(v, i, kind, e) for v, i, e in heap if e == ep[i]]
        out.sort(key=lambda p: (p.value, p.kind, p.var))
        return out

    def z(self, lam: float) -> float:
        return self.B + self.N_F * lam - self.F

    def value(self, lam: float) -> float:
        return self.V_B + self.N_F * self.phi(lam)


def init_state(inst: Instance, K, objective: ConvexObjective) -> BookkeepingState:
    """Fresh search state for the partition ``K``: every variable at its lower bound."""
    a = assignment_of(K, inst.n)
    lo, hi = inst.interval_bounds(a)
    return BookkeepingState(lo, hi, inst.b, objective, a.tolist())


def _search(state: BookkeepingState, R: float | None, limit: float) -> MultiplierResult | None:
    """Consume breakpoints in increasing order (lower before upper on ties).

    With ``R`` given, stop before the first breakpoint at which ``z`` reaches
    ``R`` and return the search result (the state is left *unsettled*); with
    ``R = None`` consume every breakpoint ``<= limit`` and return ``None``.
    """
    ep, phi = state.epoch, state.phi
    lower, upper, b = state.lower, state.upper, state.b
    rl, rlv, pl, ql = state.run_lower, state.run_lower_var, state.pos_lower, state.queue_lower
    ru, ruv, pu, qu = state.run_upper, state.run_upper_var, state.pos_upper, state.queue_upper
    nl, nu = len(rl), len(ru)
    B, F, NF, VB = state.B, state.F, state.N_F, state.V_B
    pop = heapq.heappop
    isclose = math.isclose
    inf = math.inf
    last = None
    result = None
    while True:
        # smallest live lower breakpoint, from the sorted run or the heap
        while pl < nl and ep[rlv[pl]]:
            pl += 1
        while ql and ql[0][2] != ep[ql[0][1]]:
            pop(ql)
        vl = rl[pl] if pl < nl else inf
        lower_from_heap = bool(ql) and ql[0][0] < vl
        if lower_from_heap:
            vl = ql[0][0]
        # same for upper
        while pu < nu and ep[ruv[pu]]:
            pu += 1
        while qu and qu[0][2] != ep[qu[0][1]]:
            pop(qu)
        vu = ru[pu] if pu < nu else inf
        upper_from_heap = bool(qu) and qu[0][0] < vu
        if upper_from_heap:
            vu = qu[0][0]

        is_lower = vl <= vu
        v = vl if is_lower else vu
        if v == inf:
            if R is not None:
                if last is not None and isclose(B, R, rel_tol=REL_TOL, abs_tol=ABS_TOL):
                    result = MultiplierResult(last, VB + NF * phi(last), Status.FOUND)
                elif B > R:
                    result = MultiplierResult(math.nan, inf, Status.INFEASIBLE_LOW)
                else:
                    result = MultiplierResult(math.nan, inf, Status.INFEASIBLE_HIGH)
            break
        if R is None:
            if v > limit:
                break
        else:
            lhs = B + NF * v - F
            hit = isclose(lhs, R, rel_tol=REL_TOL, abs_tol=ABS_TOL)
            if hit or lhs > R:
                if hit:
                    lam = v
                elif NF == 0:
                    result = MultiplierResult(math.nan, inf, Status.INFEASIBLE_LOW)
                    break
                else:
                    lam = (R - B + F) / NF
                result = MultiplierResult(lam, math.nan, Status.FOUND)
                break
        if is_lower:
            if lower_from_heap:
                i = pop(ql)[1]
            else:
                i = rlv[pl]
                pl += 1
            B -= lower[i]
            F += b[i]
            NF += 1
            VB -= phi(v)
        else:
            if upper_from_heap:
                i = pop(qu)[1]
            else:
                i = ruv[pu]
                pu += 1
            B += upper[i]
            F -= b[i]
            NF -= 1
            VB += phi(v)
            if NF == 0:
                F = 0.0
        last = v
    state.pos_lower, state.pos_upper = pl, pu
    state.B, state.F, state.N_F, state.V_B = B, F, NF, VB
    return result


def advance_to(state: BookkeepingState, lam: float) -> BookkeepingState:
    """Consume every live breakpoint with value ``<= lam``."""
    _search(state, None, lam)
    return state


def advance(state: BookkeepingState, R: float) -> MultiplierResult:
    """Resume the breakpoint search until ``z(lam) = R``.

    Returns the smallest multiplier with ``z(lam) = R`` above the point the
    state is settled at, and leaves the state settled at it. The threshold test
    at each breakpoint uses the bookkeeping values from before that breakpoint
    is applied.
    """
    res = _search(state, R, math.inf)
    if res.status is Status.FOUND and math.isnan(res.V):
        advance_to(state, res.lam)
        res = MultiplierResult(res.lam, state.V_B + state.N_F * state.phi(res.lam), Status.FOUND)
    return res


def reconstruct_bounds(lower, upper, b, lam: float) -> np.ndarray:
    return np.clip(lam - np.asarray(b, dtype=float), lower, upper)


def reconstruct(inst: Instance, K, lam: float) -> np.ndarray:
    lo, hi = inst.partition_bounds(K)
    return reconstruct_bounds(lo, hi, inst.b, lam)


def solve_box(lower, upper, b, R: float, objective=ConvexObjective.QUADRATIC):
    """Solve one box-constrained simple RAP from scratch.

    Returns ``(x, result)``; ``x`` is ``None`` when the box cannot hold ``R``.
    """
    state = BookkeepingState(lower, upper, b, objective)
    res = advance(state, R)
    if not res.found:
        return None, res
    return reconstruct_bounds(lower, upper, b, res.lam), res
