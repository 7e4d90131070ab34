import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import admissible_instances, close, counterexample, toy
from rapdibc import (
    ConvexObjective,
    Instance,
    NotAdmissibleError,
    NotCanonicalError,
    algorithm1,
    brute_force,
    eval_objective,
    init_state,
    random_instance,
    shift_partition,
    solve,
    solve_instance,
)
from rapdibc.simple_rap import advance, advance_to, reconstruct
from rapdibc.sweep import BestTracker, enumerate_subpartitions

Q, ABS, HINGE = ConvexObjective.QUADRATIC, ConvexObjective.ABS, ConvexObjective.HINGE


def snapshot(state):
    live = sorted((p.value, p.var, p.kind) for p in state.live_breakpoints())
    return state.B, state.F, state.N_F, state.V_B, live


def states_equal(a, b, tol):
    sa, sb = snapshot(a), snapshot(b)
    if sa[2] != sb[2] or len(sa[4]) != len(sb[4]):
        return False
    if any(abs(x - y) > tol * max(1.0, abs(x), abs(y)) for x, y in zip(sa[:4], sb[:4]) if x != y):
        return False
    for (v1, i1, k1), (v2, i2, k2) in zip(sa[4], sb[4]):
        if (i1, k1) != (i2, k2) or abs(v1 - v2) > tol * max(1.0, abs(v1)):
            return False
    return a.lower == b.lower and a.upper == b.upper and a.assignment == b.assignment


def transfer_triple(rng, inst, objective=Q, integer_lam=False):
    """Random ``(K, lam)`` with ``K[-1] < n``; returns (shifted, fresh) states for ``K+``."""
    n, m = inst.n, inst.m
    K = tuple(sorted(int(v) for v in rng.integers(0, n, m - 1)))
    Kp = K[:-1] + (K[-1] + 1,)
    state = init_state(inst, K, objective)
    points = [p.value for p in state.live_breakpoints()]
    lam = float(rng.uniform(min(points) - 1, max(points) + 1))
    if integer_lam or rng.random() < 0.3:
        lam = float(rng.choice(points)) if rng.random() < 0.5 else float(round(lam))
    advance_to(state, lam)
    shift_partition(state, inst, K, lam)
    fresh = init_state(inst, Kp, objective)
    advance_to(fresh, lam)
    return state, fresh


# --- enumeration ---------------------------------------------------------------------

@pytest.mark.parametrize("n, m, count", [(3, 2, 1), (2, 3, 3), (3, 4, 10), (5, 1, 1)])
def test_subpartition_counts(n, m, count):
    subs = list(enumerate_subpartitions(n, m))
    assert len(subs) == count == math.comb(n + max(m - 2, 0), max(m - 2, 0))
    assert subs == sorted(subs)
    assert all(len(s) == max(m - 2, 0) for s in subs)


def test_subpartitions_explicit():
    assert list(enumerate_subpartitions(2, 3)) == [(0,), (1,), (2,)]


# --- shift_partition ---------------------------------------------------------------------

def test_shift_middle_to_degenerate():
    inst = toy(n=2)
    state = init_state(inst, (0,), Q)  # both variables in [2, 4]
    advance_to(state, 2.5)
    before = (state.B, state.F, state.N_F, state.V_B)
    assert before == (0.0, 0.0, 2, 0.0)
    shift_partition(state, inst, (0,), 2.5)
    assert (state.B, state.F, state.N_F, state.V_B) == (0.0, 0.0, 1, 0.0)
    assert [(p.var, p.kind) for p in state.live_breakpoints()] == [(1, 1)]


def test_shift_below_alpha_reinserts_both():
    inst = Instance(b=[0, 0], first_lower=[0, 0], last_upper=[9, 9],
                    shared_lower=[5], shared_upper=[3], R=6)
    state = init_state(inst, (0,), Q)
    shift_partition(state, inst, (0,), -1.0)
    assert state.B == 5 + 0
    assert state.V_B == 25 + 0
    kinds = sorted((p.value, p.var, p.kind) for p in state.live_breakpoints())
    assert kinds == [(0.0, 0, 0), (3.0, 0, 1), (5.0, 1, 0), (9.0, 1, 1)]


def test_shift_above_both_betas():
    inst = Instance(b=[1, 0], first_lower=[0, 0], last_upper=[9, 9],
                    shared_lower=[5], shared_upper=[3], R=6)
    state = init_state(inst, (0,), Q)
    advance_to(state, 20.0)
    B, VB = state.B, state.V_B
    shift_partition(state, inst, (0,), 20.0)
    assert state.B == B + (3 - 9)
    assert state.V_B == VB + (3 + 1) ** 2 - (9 + 1) ** 2
    assert state.live_breakpoints() == []


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(2, 3))
def test_state_transfer_integer_exact(seed, n, m):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, m, integer=True)
    shifted, fresh = transfer_triple(rng, inst, integer_lam=True)
    assert states_equal(shifted, fresh, 0.0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(2, 3),
       st.sampled_from(list(ConvexObjective)))
def test_state_transfer_float(seed, n, m, phi):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, m)
    shifted, fresh = transfer_triple(rng, inst, phi)
    assert states_equal(shifted, fresh, 1e-12)


# --- solve: worked examples ---------------------------------------------------------------

def test_toy():
    sol = solve(toy())
    assert sol.optimal
    assert sol.objective == 12.5
    assert sol.partition == (1,)
    np.testing.assert_array_equal(sol.x, [0, 2.5, 2.5])


def test_counterexample_quadratic():
    sol = solve(counterexample(), keep_log=True)
    assert sol.objective == pytest.approx(0.5225, abs=1e-9)
    np.testing.assert_allclose(sol.x, [1, 1, 1])
    values = sorted(V for _, _, V, status in sol.record.log if status == "found")
    assert values[0] == pytest.approx(0.5225, abs=1e-12)
    assert values[1] == pytest.approx(0.7225, abs=1e-12)


def test_counterexample_hinge():
    inst = counterexample()
    sol = solve(inst, HINGE)
    assert sol.objective == 0
    np.testing.assert_allclose(sol.x, [0, 1.5, 1.5])
    assert eval_objective(inst, HINGE, [1, 1, 1]) == pytest.approx(0.15)


def test_infeasible_status():
    sol = solve(toy(R=13))
    assert not sol.optimal and sol.x is None and math.isinf(sol.objective)
    sol = solve(toy(R=1))
    assert not sol.optimal


def test_requires_canonical_admissible():
    with pytest.raises(NotCanonicalError):
        solve(Instance(b=[0, 1], first_lower=[0, 0], last_upper=[1, 1],
                       shared_lower=[], shared_upper=[], R=1))
    bad = Instance(b=[1, 0], first_lower=[0.8, 0.5], last_upper=[3.5, 3.2],
                   shared_lower=[3], shared_upper=[1], R=4)
    with pytest.raises(NotAdmissibleError):
        solve(bad)


def test_m1_single_partition():
    inst = Instance(b=[1, 0], first_lower=[0, 0], last_upper=[4, 4],
                    shared_lower=[], shared_upper=[], R=4)
    sol = solve(inst)
    assert sol.partition == () and sol.lam == 2.5
    np.testing.assert_array_equal(sol.x, [1.5, 2.5])


def test_solve_instance_maps_back():
    inst = Instance(b=[-1.5, -0.85, -1.5], first_lower=[0, 0, 0], last_upper=[3, 3, 3],
                    shared_lower=[1], shared_upper=[0], R=3)
    sol = solve_instance(inst, HINGE)
    np.testing.assert_allclose(sol.x, [1.5, 0, 1.5])
    assert sol.objective == eval_objective(inst, HINGE, sol.x)


# --- solve: properties ----------------------------------------------------------------------

@given(admissible_instances(n_max=7, m_max=3), st.sampled_from(list(ConvexObjective)))
def test_matches_brute_force(inst, phi):
    sol = solve(inst, phi)
    ref = brute_force(inst, phi)
    assert sol.status == ref.status
    if sol.optimal:
        assert close(sol.objective, ref.objective)
        assert sol.record.violations == 0


@given(admissible_instances(n_max=6, m_max=4))
def test_matches_algorithm1_m4(inst):
    sol = solve(inst)
    assert close(sol.objective, algorithm1(inst).objective)


@given(admissible_instances(n_max=7, m_max=4), st.sampled_from(list(ConvexObjective)))
def test_log_consistency(inst, phi):
    sol = solve(inst, phi, keep_log=True)
    rec = sol.record
    log = rec.log
    # count property: every (K', k) pair is processed or skipped exactly once
    expected = sum(inst.n - (Kp[-1] if Kp else 0) + 1
                   for Kp in enumerate_subpartitions(inst.n, inst.m)) if inst.m > 1 else 1
    assert rec.pairs == len(log) == expected
    found = [(K, lam, V) for K, lam, V, status in log if status == "found"]
    assert rec.feasible == len(found)
    for K, lam, V in found:
        x = reconstruct(inst, K, lam)
        assert close(V, eval_objective(inst, phi, x))
    # multipliers increase strictly while only the last split point moves
    for (K1, l1, _), (K2, l2, _) in zip(found, found[1:]):
        if K1[:-1] == K2[:-1] and K2[-1] == K1[-1] + 1:
            assert l2 > l1
    if sol.optimal:
        assert sol.objective == pytest.approx(min(V for _, _, V in found), rel=1e-9, abs=1e-12)
    assert rec.violations == 0


def test_tie_break_lexicographic():
    # symmetric instance: any single variable may idle; K=(1) is the smallest optimal
    sol = solve(toy(R=5))
    assert sol.partition == (1,)
    again = solve(toy(R=5))
    assert again.partition == sol.partition and again.objective == sol.objective


def test_best_tracker_schedule_independent():
    offers = [(1.0, (3,), 0.1), (0.5, (4,), 0.2), (0.5 + 1e-13, (1,), 0.3), (2.0, (0,), 0.4)]
    seq = BestTracker()
    for o in offers:
        seq.offer(*o)
    left, right = BestTracker(), BestTracker()
    for o in offers[:2]:
        left.offer(*o)
    for o in offers[2:]:
        right.offer(*o)
    left.extend(right)
    assert seq.best() == left.best() == (0.5, (4,), 0.2)


def test_parallel_matches_sequential():
    rng = np.random.default_rng(7)
    inst = random_instance(rng, 12, 4)
    a = solve(inst, workers=1)
    b = solve(inst, workers=2)
    assert a.partition == b.partition and a.objective == b.objective and a.lam == b.lam
    np.testing.assert_array_equal(a.x, b.x)
