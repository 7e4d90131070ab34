"""Instance generators.

All randomness goes through ``numpy.random.Generator`` seeded with an integer,
which uses the PCG64 bit generator; streams are reproducible across platforms
for a given numpy major version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GenerationFailedError, InfeasibleDemandError
from .instance import Instance, canonicalize, case_flags

EV_ENERGY_WH = (9750.0, 19500.0, 39000.0)


@dataclass(frozen=True)
class SyntheticGenConfig:
    n: int
    m: int
    seed: int = 0
    resample_limit: int = 100

    def __post_init__(self):
        if self.n < 1 or self.m < 2:
            raise ValueError("synthetic instances need n >= 1 and m >= 2")


def gen_synthetic(cfg: SyntheticGenConfig) -> Instance:
    """Scalability instance with all four case conditions holding by design.

    Interior intervals have random gaps and widths in (0, 1) starting from a
    first-interval upper bound of 2; first lowers rise towards 1 and last
    uppers fall from ``sl[-1] + 1`` in steps below ``1 / n``; ``b`` decreases
    to 0 in unit-uniform steps; ``R`` is uniform over the span of first lowers
    to last uppers. Draws that are not solver-admissible (or, for a single
    variable, put ``R`` in a gap) are redrawn up to ``cfg.resample_limit`` times.
    """
    rng = np.random.default_rng(cfg.seed)
    n, m = cfg.n, cfg.m
    for _ in range(cfg.resample_limit):
        gaps = rng.uniform(0.0, 1.0, m - 1)
        widths = rng.uniform(0.0, 1.0, m - 2)
        su = np.empty(m - 1)
        sl = np.empty(m - 1)
        su[0] = 2.0
        for j in range(1, m):
            sl[j - 1] = su[j - 1] + gaps[j - 1]
            if j < m - 1:
                su[j] = sl[j - 1] + widths[j - 1]
        W = rng.uniform(0.0, 1.0 / n, n - 1)
        Z = rng.uniform(0.0, 1.0 / n, n - 1)
        first_lower = 1.0 - np.concatenate([np.cumsum(W[::-1])[::-1], [0.0]])
        last_upper = sl[-1] + 1.0 - np.concatenate([[0.0], np.cumsum(Z)])
        R = rng.uniform(first_lower.sum(), last_upper.sum())
        V = rng.uniform(0.0, 1.0, n - 1)
        b = np.concatenate([np.cumsum(V[::-1])[::-1], [0.0]])
        try:
            inst = Instance(b, first_lower, last_upper, sl, su, R)
        except ValueError:
            continue
        # the second test only bites for n == 1, where R itself may fall in a gap
        if case_flags(inst).admissible and greedy_condition(inst, "F2,L2"):
            return inst
    raise GenerationFailedError(f"no admissible draw in {cfg.resample_limit} attempts")


def household_profile(T: int = 56, dt: float = 0.25, start_hour: float = 18.0,
                      seed: int = 0) -> np.ndarray:
    """Synthetic household base load in kW over ``T`` slots from ``start_hour``.

    A smooth daily shape (evening peak, night trough, morning rise) with
    multiplicative noise and occasional appliance spikes.
    """
    rng = np.random.default_rng(seed)
    hours = (start_hour + dt * np.arange(T)) % 24.0
    evening = 0.9 * np.exp(-0.5 * ((hours - 19.5) / 1.5) ** 2)
    morning = 0.5 * np.exp(-0.5 * ((hours - 7.5) / 1.0) ** 2)
    base = 0.25 + rng.uniform(0.0, 0.2)
    shape = base + rng.uniform(0.6, 1.4) * evening + rng.uniform(0.5, 1.5) * morning
    noisy = shape * rng.lognormal(0.0, 0.15, T)
    spikes = (rng.random(T) < 0.05) * rng.uniform(0.5, 2.0, T)
    return np.round(noisy + spikes, 4)


@dataclass(frozen=True)
class EvGenConfig:
    """EV charging with a minimum threshold; power in kW, energy in kWh."""

    energy_kwh: float
    T: int = 56
    dt: float = 0.25
    x_min: float = 1.1
    x_max: float = 6.6
    profile: tuple | None = None
    seed: int = 0

    @classmethod
    def from_wh(cls, energy_wh: float, **kwargs) -> "EvGenConfig":
        return cls(energy_kwh=energy_wh / 1000.0, **kwargs)

    def __post_init__(self):
        if not 0.0 < self.x_min <= self.x_max:
            raise ValueError("need 0 < x_min <= x_max")
        if self.profile is not None and len(self.profile) != self.T:
            raise ValueError("profile must have T entries")


def gen_ev(cfg: EvGenConfig, *, canonical: bool = True) -> Instance:
    """Charging instance, sorted by base load unless ``canonical=False``.

    Slot ``t`` draws ``x_t`` kW in ``{0} u [x_min, x_max]`` on top of the base
    load ``p_t``; the energy constraint ``sum(dt * x_t) = E`` becomes the
    resource ``R = E / dt``. With ``canonical=False`` the slots stay in time
    order, which is what the command line writes so that solutions come back
    per time slot.
    """
    p = (np.asarray(cfg.profile, dtype=float) if cfg.profile is not None
         else household_profile(cfg.T, cfg.dt, seed=cfg.seed))
    R = cfg.energy_kwh / cfg.dt
    if cfg.energy_kwh < 0 or R > cfg.T * cfg.x_max * (1 + 1e-12):
        raise InfeasibleDemandError(
            f"energy {cfg.energy_kwh} kWh cannot be delivered in {cfg.T} slots"
        )
    inst = Instance(
        b=p,
        first_lower=np.zeros(cfg.T),
        last_upper=np.full(cfg.T, cfg.x_max),
        shared_lower=[cfg.x_min],
        shared_upper=[0.0],
        R=R,
    )
    return canonicalize(inst)[0] if canonical else inst


def random_instance(rng: np.random.Generator, n: int, m: int, *, integer: bool = False,
                    max_bound: int = 8, attempts: int = 1000) -> Instance:
    """Small random canonical admissible instance for testing.

    Mixes all four case combinations, degenerate intervals and both feasible
    and infeasible resource values. Integer instances keep every bound in
    ``[0, max_bound]``.
    """
    for _ in range(attempts):
        if integer:
            inst = _random_integer(rng, n, m, max_bound)
        else:
            inst = _random_real(rng, n, m)
        if inst is not None and case_flags(inst).admissible:
            return inst
    raise GenerationFailedError("could not draw an admissible instance")


def _random_real(rng, n, m):
    cuts = np.cumsum(rng.uniform(0.2, 2.0, 2 * m))
    su = cuts[1:2 * m - 2:2] if m > 1 else np.empty(0)
    sl = cuts[2:2 * m - 1:2] if m > 1 else np.empty(0)
    lo0 = cuts[0]
    if m == 1:
        first_lower = lo0 - rng.uniform(0.0, 1.0, n)
        last_upper = lo0 + rng.uniform(0.0, 3.0, n)
    else:
        mode = rng.integers(3)
        if mode == 0:
            first_lower = np.full(n, su[0] if rng.random() < 0.3 else lo0)
        else:
            first_lower = su[0] - rng.uniform(0.0, su[0] - lo0 + 1.5, n)
        last_upper = sl[-1] + rng.uniform(0.0, 2.5, n) * (rng.random(n) > 0.1)
    b = np.sort(rng.uniform(-3.0, 3.0, n))[::-1]
    if rng.random() < 0.2:
        b = np.round(b)
        b = np.sort(b)[::-1]
    if m > 1 and rng.random() < 0.5:
        first_lower = np.sort(first_lower) if rng.random() < 0.5 else first_lower
        last_upper = np.sort(last_upper) if rng.random() < 0.5 else last_upper
    lo_sum, hi_sum = first_lower.sum(), last_upper.sum()
    R = rng.uniform(lo_sum - 0.2 * abs(lo_sum) - 0.5, hi_sum + 0.5) if rng.random() < 0.1 \
        else rng.uniform(lo_sum, hi_sum)
    try:
        return Instance(b, first_lower, last_upper, sl, su, R)
    except ValueError:
        return None


def _random_integer(rng, n, m, max_bound):
    if m == 1:
        lo = rng.integers(0, max_bound + 1, n)
        hi = np.minimum(lo + rng.integers(0, max_bound + 1, n), max_bound)
        sl = su = np.empty(0)
        first_lower, last_upper = lo, hi
    else:
        # 2(m-1) distinct-enough cut points for shared bounds
        pts = np.sort(rng.choice(np.arange(0, max_bound + 1), size=2 * (m - 1), replace=True))
        su = pts[0::2].astype(float)
        sl = pts[1::2].astype(float)
        if np.any(sl <= su) or np.any(su[1:] < sl[:-1]):
            return None
        first_lower = rng.integers(0, int(su[0]) + 1, n)
        last_upper = rng.integers(int(sl[-1]), max_bound + 1, n)
    b = np.sort(rng.integers(-4, 5, n))[::-1]
    if m > 1 and rng.random() < 0.5:
        first_lower = np.sort(first_lower)
        if rng.random() < 0.5:
            last_upper = np.sort(last_upper)
    R = rng.integers(int(first_lower.sum()), int(last_upper.sum()) + 1)
    try:
        return Instance(b, first_lower, last_upper, sl, su, R, integer=True)
    except ValueError:
        return None


GREEDY_CASES = ("F1,L2", "F2,L1", "F2,L2")


def greedy_condition(inst: Instance, case: str) -> bool:
    """Whether ``R`` lies in the range where the greedy construction covers ``case``."""
    n, R = inst.n, inst.R
    fl, lu = inst.first_lower, inst.last_upper
    sl, su = inst.shared_lower, inst.shared_upper
    if not fl.sum() <= R <= lu.sum():
        return False
    if case == "F1,L2":
        return R <= n * su[0] or R >= sl[-1] + fl[1:].sum()
    if case == "F2,L1":
        return R >= n * sl[-1] or R <= lu[:-1].sum() + su[0]
    if case == "F2,L2":
        # always true for n >= 2; with a single variable R itself must avoid the gaps
        return R >= sl[-1] + fl[1:].sum() or R <= lu[:-1].sum() + su[0]
    raise ValueError(f"unknown case {case!r}")


def random_case_instance(rng: np.random.Generator, n: int, m: int, case: str,
                         attempts: int = 1000) -> Instance:
    """Random instance satisfying the flags of ``case`` and its greedy condition.

    The complementary flags are violated whenever the draw allows it, so
    that each case is exercised on its own.
    """
    want_f1 = case.startswith("F1")
    want_l1 = case.endswith("L1")
    for _ in range(attempts):
        gaps = rng.uniform(0.2, 2.0, m - 1)
        widths = rng.uniform(0.0, 1.5, m - 2)
        su0 = rng.uniform(1.0, 4.0)
        su, sl = [su0], []
        for j in range(m - 1):
            sl.append(su[-1] + gaps[j])
            if j < m - 2:
                su.append(sl[-1] + widths[j])
        su, sl = np.array(su), np.array(sl)
        gmax = gaps.max()
        if want_f1:
            first_lower = np.sort(su0 - rng.uniform(0.0, 1.2 * gmax, n))
        else:
            first_lower = su0 - rng.uniform(gmax, gmax + 2.0, n)
        if want_l1:
            last_upper = np.sort(sl[-1] + rng.uniform(0.0, 1.2 * gmax, n))
        else:
            last_upper = sl[-1] + rng.uniform(gmax, gmax + 2.0, n)
        lo, hi = first_lower.sum(), last_upper.sum()
        R = rng.uniform(lo, hi)
        b = np.sort(rng.uniform(-3.0, 3.0, n))[::-1]
        try:
            inst = Instance(b, first_lower, last_upper, sl, su, R)
        except ValueError:
            continue
        flags = case_flags(inst)
        ok = (flags.f1 if want_f1 else flags.f2) and (flags.l1 if want_l1 else flags.l2)
        if ok and greedy_condition(inst, case):
            return inst
    raise GenerationFailedError(f"could not draw a {case} instance")


def counterexample_instance(n: int = 3, L: float = 1.0, eps: float = 0.1) -> Instance:
    """Idle-or-run instance whose quadratic optimum is not optimal for the hinge.

    Every variable lies in ``{0} u [L, n L]`` with ``R = n L``. Variable 0 has
    ``b = -nL / (2(n-1)) - eps``, the others ``b = -nL / (n-1)``. Requires
    ``0 < eps < L (n/2 - 1) / (n - 1)``.
    """
    if n < 3 or not 0 < eps < L * (n / 2 - 1) / (n - 1):
        raise ValueError("need n >= 3 and 0 < eps < L (n/2 - 1) / (n - 1)")
    c = n * L / (n - 1)
    b = np.full(n, -c)
    b[0] = -c / 2 - eps
    return Instance(b=b, first_lower=np.zeros(n), last_upper=np.full(n, n * L),
                    shared_lower=[L], shared_upper=[0.0], R=n * L)
