"""Amortized partition sweep over all monotone interval assignments.

Some optimal solution assigns intervals monotonically in the (b-sorted)
variable index, so it is described by a partition vector ``K`` of length
``m - 1`` with ``0 <= K[0] <= ... <= K[m-2] <= n``. For each prefix ``K'`` of
length ``m - 2`` a single resumable breakpoint search solves every partition
``K' + (k,)`` for ``k = K'[-1] .. n``: going from ``k`` to ``k + 1`` moves
variable ``k`` from the last interval to the one below it, the optimal
multiplier strictly increases, and the bookkeeping state is patched in O(1)
instead of being rebuilt.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .instance import (
    ABS_TOL,
    REL_TOL,
    ConvexObjective,
    Instance,
    eval_objective,
    isclose,
    validate,
)
from .simple_rap import BookkeepingState, advance, init_state, reconstruct


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass
class Solution:
    x: np.ndarray | None
    lam: float
    partition: tuple[int, ...]
    objective: float
    status: SolveStatus
    record: SweepRecord | None = None

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


@dataclass
class SweepRecord:
    """Bookkeeping of one solve, mainly for verification.

    ``log`` (only filled when requested) holds ``(K, lam, V, status)`` for every
    partition visited, where status is ``"found"``, ``"skipped"`` or a search
    failure. ``violations`` counts consecutive feasible partitions within one
    uninterrupted sweep whose multipliers fail to strictly increase.
    """

    best_V: float = math.inf
    best_K: tuple[int, ...] = ()
    best_lam: float = math.nan
    pairs: int = 0
    feasible: int = 0
    reinits: int = 0
    violations: int = 0
    log: list | None = None

    def merge(self, other: SweepRecord) -> None:
        self.pairs += other.pairs
        self.feasible += other.feasible
        self.reinits += other.reinits
        self.violations += other.violations
        if self.log is not None and other.log is not None:
            self.log.extend(other.log)


def _tie_tol(v: float) -> float:
    return max(ABS_TOL, REL_TOL * abs(v))


class BestTracker:
    """Arg-min over partitions with a schedule-independent tie rule.

    Among partitions whose value is within tolerance of the overall minimum, the
    first one offered wins; callers offer partitions in lexicographic order, so
    the lexicographically smallest near-optimal partition is selected. Keeping
    every near-minimal candidate makes chunked (parallel) reductions agree
    exactly with the sequential one.
    """

    def __init__(self):
        self.value = math.inf
        self.candidates: list[tuple[float, tuple[int, ...], float]] = []

    def offer(self, V: float, K: tuple[int, ...], lam: float) -> None:
        if V > self.value + _tie_tol(self.value):
            return
        if V < self.value:
            self.value = V
            cutoff = V + _tie_tol(V)
            self.candidates = [c for c in self.candidates if c[0] <= cutoff]
        self.candidates.append((V, K, lam))

    def extend(self, other: BestTracker) -> None:
        for c in other.candidates:
            self.offer(*c)

    def best(self):
        if not self.candidates:
            return None
        cutoff = self.value + _tie_tol(self.value)
        return next(c for c in self.candidates if c[0] <= cutoff)


def enumerate_subpartitions(n: int, m: int):
    """Non-decreasing vectors of length ``m - 2`` over ``0..n`` in lexicographic order."""
    return itertools.combinations_with_replacement(range(n + 1), max(m - 2, 0))


def shift_partition(state: BookkeepingState, inst: Instance, K, lam: float) -> BookkeepingState:
    """Turn a state settled at ``lam`` for ``K`` into the one for ``K`` with its last entry + 1.

    Variable ``t = K[-1]`` drops one interval. Its old contribution is removed
    according to where ``lam`` sits relative to its old breakpoints, then its
    new contribution is added the same way, inserting only the new breakpoints
    that lie above ``lam``. Old queue entries of ``t`` go stale through its epoch.
    """
    t = K[-1]
    phi = state.phi
    bt = state.b[t]
    lo, hi = state.lower[t], state.upper[t]
    alpha, beta = lo + bt, hi + bt
    if lam < alpha:
        state.B -= lo
        state.V_B -= phi(alpha)
    elif lam < beta:
        state.F -= bt
        state.N_F -= 1
        if state.N_F == 0:
            state.F = 0.0
    else:
        state.B -= hi
        state.V_B -= phi(beta)

    ep = state.epoch[t] + 1
    state.epoch[t] = ep
    j = state.assignment[t] - 1
    state.assignment[t] = j
    lo, hi = inst.lower(t, j), inst.upper(t, j)
    state.lower[t], state.upper[t] = lo, hi
    alpha, beta = lo + bt, hi + bt
    if lam < alpha:
        state.B += lo
        state.V_B += phi(alpha)
        heapq.heappush(state.queue_lower, (alpha, t, ep))
        heapq.heappush(state.queue_upper, (beta, t, ep))
    elif lam < beta:
        state.F += bt
        state.N_F += 1
        heapq.heappush(state.queue_upper, (beta, t, ep))
    else:
        state.B += hi
        state.V_B += phi(beta)
    return state


class _PartitionSums:
    """O(m) evaluation of the sum of lower and upper bounds under a partition."""

    def __init__(self, inst: Instance):
        self.n, self.m = inst.n, inst.m
        self.pre_first = np.concatenate([[0.0], np.cumsum(inst.first_lower)]).tolist()
        self.pre_last = np.concatenate([[0.0], np.cumsum(inst.last_upper)]).tolist()
        self.sl = inst.shared_lower.tolist()
        self.su = inst.shared_upper.tolist()

    def __call__(self, K) -> tuple[float, float]:
        n, m = self.n, self.m
        if m == 1:
            return self.pre_first[n], self.pre_last[n]
        lo = self.pre_first[K[0]]
        hi = K[0] * self.su[0]
        for j in range(1, m - 1):
            cnt = K[j] - K[j - 1]
            lo += cnt * self.sl[j - 1]
            hi += cnt * self.su[j]
        lo += (n - K[m - 2]) * self.sl[m - 2]
        hi += self.pre_last[n] - self.pre_last[K[m - 2]]
        return lo, hi


def _below(a: float, R: float) -> bool:
    return a < R and not isclose(a, R)


def continuous_score(res, state, n):
    return res.V


def _run_sweeps(inst: Instance, objective, subpartitions, score, keep_log: bool):
    """Process a batch of subpartitions; returns ``(BestTracker, SweepRecord)``."""
    n, m, R = inst.n, inst.m, inst.R
    sums = _PartitionSums(inst)
    best = BestTracker()
    rec = SweepRecord(log=[] if keep_log else None)
    log = rec.log

    for Kp in subpartitions:
        Kp = tuple(Kp)
        start = Kp[-1] if Kp else 0
        state = None
        prev_K = None
        prev_lam = None
        for k in range(start, n + 1):
            K = Kp + (k,)
            rec.pairs += 1
            lo_sum, hi_sum = sums(K)
            if _below(R, lo_sum):
                state = None
                if log is not None:
                    log.append((K, math.nan, math.inf, "skipped"))
                continue
            if _below(hi_sum, R):
                # sums of bounds only decrease further along the sweep
                if log is not None:
                    for kk in range(k, n + 1):
                        log.append((Kp + (kk,), math.nan, math.inf, "skipped"))
                rec.pairs += n - k
                break
            if state is None:
                state = init_state(inst, K, objective)
                rec.reinits += 1
                prev_lam = None
            else:
                shift_partition(state, inst, prev_K, prev_lam)
            res = advance(state, R)
            if not res.found:
                state = None
                if log is not None:
                    log.append((K, math.nan, math.inf, res.status.value))
                continue
            rec.feasible += 1
            if prev_lam is not None and not res.lam > prev_lam:
                rec.violations += 1
            V = score(res, state, n)
            if log is not None:
                log.append((K, res.lam, V, "found"))
            best.offer(V, K, res.lam)
            prev_K, prev_lam = K, res.lam
    return best, rec


def _run_chunk(args):
    return _run_sweeps(*args)


def _chunks(seq, k):
    size = max(1, math.ceil(len(seq) / k))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def sweep(inst: Instance, objective, *, score=continuous_score, workers=None, keep_log=False):
    """Run every sweep and return ``(BestTracker, SweepRecord)``.

    ``score(result, state, n)`` turns a found multiplier into the value that is
    minimized over partitions; it must be a module-level function when
    ``workers > 1``.

    With ``workers > 1`` the subpartitions are split into contiguous chunks that
    run in separate processes; the reduction gives the same answer as the
    sequential run.
    """
    objective = ConvexObjective.parse(objective)
    if inst.m == 1:
        return _run_sweeps_single(inst, objective, score, keep_log)
    subs = list(enumerate_subpartitions(inst.n, inst.m))
    if workers and workers > 1 and len(subs) > 1:
        jobs = [(inst, objective, c, score, keep_log) for c in _chunks(subs, workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_chunk, jobs))
        best, rec = BestTracker(), SweepRecord(log=[] if keep_log else None)
        for b, r in results:
            best.extend(b)
            rec.merge(r)
        return best, rec
    return _run_sweeps(inst, objective, subs, score, keep_log)


def _run_sweeps_single(inst, objective, score, keep_log):
    best = BestTracker()
    rec = SweepRecord(log=[] if keep_log else None)
    rec.pairs = 1
    state = init_state(inst, (), objective)
    res = advance(state, inst.R)
    if res.found:
        rec.feasible = 1
        V = score(res, state, inst.n)
        best.offer(V, (), res.lam)
    if rec.log is not None:
        rec.log.append(((), res.lam, res.V, res.status.value))
    return best, rec


def _finish(inst, objective, best: BestTracker, rec: SweepRecord, materialize) -> Solution:
    top = best.best()
    if top is None:
        return Solution(None, math.nan, (), math.inf, SolveStatus.INFEASIBLE, rec)
    V, K, lam = top
    rec.best_V, rec.best_K, rec.best_lam = V, K, lam
    x = materialize(inst, K, lam)
    return Solution(x, lam, K, eval_objective(inst, objective, x), SolveStatus.OPTIMAL, rec)


def solve(inst: Instance, objective=ConvexObjective.QUADRATIC, *, workers=None, keep_log=False) -> Solution:
    """Optimal continuous solution of a canonical, admissible instance."""
    validate(inst)
    objective = ConvexObjective.parse(objective)
    best, rec = sweep(inst, objective, workers=workers, keep_log=keep_log)
    return _finish(inst, objective, best, rec, reconstruct)
