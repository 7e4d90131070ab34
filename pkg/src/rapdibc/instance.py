"""Problem data for the resource allocation problem with disjoint interval bounds.

Every variable ``x_i`` must lie in one of ``m`` disjoint closed intervals. Only the
first interval's lower bound and the last interval's upper bound vary with ``i``;
all interior bounds are shared::

    [first_lower[i], su[0]] u [sl[0], su[1]] u ... u [sl[m-2], last_upper[i]]

with ``sl = shared_lower`` and ``su = shared_upper``. Variables and intervals are
indexed from zero throughout the package.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import (
    GapError,
    LengthMismatchError,
    MalformedIntervalError,
    NonIntegralDataError,
    NotAdmissibleError,
    NotCanonicalError,
)

# Shared tolerance for every equality test on real data.
REL_TOL = 1e-9
ABS_TOL = 1e-12


def isclose(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=ABS_TOL)


def _quadratic(y):
    return y * y


def _hinge_scalar(y):
    return y if y > 0.0 else 0.0


class ConvexObjective(enum.Enum):
    """Symmetric separable cost ``phi`` applied to every ``x_i + b_i``."""

    QUADRATIC = "quadratic"
    ABS = "abs"
    HINGE = "hinge"

    @classmethod
    def parse(cls, name: str | ConvexObjective) -> ConvexObjective:
        if isinstance(name, ConvexObjective):
            return name
        aliases = {"q": "quadratic", "absolute": "abs", "max": "hinge"}
        return cls(aliases.get(name, name))

    @property
    def scalar(self):
        """Plain-float version of ``phi`` for tight loops."""
        if self is ConvexObjective.QUADRATIC:
            return _quadratic
        if self is ConvexObjective.ABS:
            return abs
        return _hinge_scalar

    def __call__(self, y):
        if self is ConvexObjective.QUADRATIC:
            return np.square(y)
        if self is ConvexObjective.ABS:
            return np.abs(y)
        return np.maximum(y, 0.0)


@dataclass(frozen=True)
class CaseFlags:
    """Which of the structural conditions on first/last interval lengths hold.

    In canonical order (``b`` non-increasing):

    * ``f1`` -- ``first_lower`` is non-decreasing;
    * ``f2`` -- every first interval is at least as long as the widest gap;
    * ``l1`` -- ``last_upper`` is non-decreasing;
    * ``l2`` -- every last interval is at least as long as the widest gap.

    ``l1`` mirrors ``f1``: variables with larger ``b`` are pushed towards lower
    intervals, so they must not have the larger last-interval capacity. With
    ``last_upper`` non-increasing instead, a monotone optimal assignment need
    not exist (``tests/test_instance.py`` keeps a concrete instance).
    """

    f1: bool
    f2: bool
    l1: bool
    l2: bool

    @property
    def admissible(self) -> bool:
        return (self.f1 or self.f2) and (self.l1 or self.l2)

    def cases(self) -> list[str]:
        out = []
        for f, fname in ((self.f1, "F1"), (self.f2, "F2")):
            for l, lname in ((self.l1, "L1"), (self.l2, "L2")):
                if f and l:
                    out.append(f"({fname},{lname})")
        return out


def _frozen(values, name) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise MalformedIntervalError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Structured problem data. Immutable; arrays are read-only.

    ``shared_lower`` holds the lower bounds of intervals ``1..m-1`` and
    ``shared_upper`` the upper bounds of intervals ``0..m-2``; both are empty
    when ``m == 1``. Construction checks array lengths and that every
    variable's intervals are well formed and strictly disjoint, but not the
    variable order: solvers require ``b`` non-increasing (see :func:`canonicalize`).
    """

    b: np.ndarray
    first_lower: np.ndarray
    last_upper: np.ndarray
    shared_lower: np.ndarray
    shared_upper: np.ndarray
    R: float
    integer: bool = False

    def __post_init__(self):
        for name in ("b", "first_lower", "last_upper", "shared_lower", "shared_upper"):
            object.__setattr__(self, name, _frozen(getattr(self, name), name))
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "integer", bool(self.integer))
        n = len(self.b)
        if n < 1:
            raise LengthMismatchError("need at least one variable")
        if len(self.first_lower) != n or len(self.last_upper) != n:
            raise LengthMismatchError(
                f"b has length {n} but first_lower/last_upper have "
                f"{len(self.first_lower)}/{len(self.last_upper)}"
            )
        if len(self.shared_lower) != len(self.shared_upper):
            raise LengthMismatchError("shared_lower and shared_upper differ in length")
        if not math.isfinite(self.R):
            raise MalformedIntervalError("R must be finite")
        self._check_intervals()
        if self.integer:
            data = np.concatenate(
                [self.b, self.first_lower, self.last_upper, self.shared_lower,
                 self.shared_upper, [self.R]]
            )
            if not np.all(data == np.round(data)):
                raise NonIntegralDataError("integer instance has fractional data")

    def _check_intervals(self):
        sl, su = self.shared_lower, self.shared_upper
        if self.m == 1:
            bad = np.nonzero(self.first_lower > self.last_upper)[0]
            if bad.size:
                raise MalformedIntervalError(f"lower exceeds upper for variable {bad[0]}")
            return
        bad = np.nonzero(self.first_lower > su[0])[0]
        if bad.size:
            raise MalformedIntervalError(f"first interval empty for variable {bad[0]}")
        bad = np.nonzero(self.last_upper < sl[-1])[0]
        if bad.size:
            raise MalformedIntervalError(f"last interval empty for variable {bad[0]}")
        for j in range(self.m - 1):
            if not su[j] < sl[j]:
                raise MalformedIntervalError(
                    f"intervals {j} and {j + 1} touch or overlap ({su[j]} >= {sl[j]})"
                )
        for j in range(1, self.m - 1):
            if sl[j - 1] > su[j]:
                raise MalformedIntervalError(f"interior interval {j} is empty")

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def m(self) -> int:
        return len(self.shared_lower) + 1

    def lower(self, i: int, j: int) -> float:
        return float(self.first_lower[i] if j == 0 else self.shared_lower[j - 1])

    def upper(self, i: int, j: int) -> float:
        return float(self.last_upper[i] if j == self.m - 1 else self.shared_upper[j])

    def interval_bounds(self, assignment) -> tuple[np.ndarray, np.ndarray]:
        """Per-variable bounds for an interval index vector."""
        a = np.asarray(assignment, dtype=np.int64)
        lo_table = np.concatenate([[0.0], self.shared_lower])
        hi_table = np.concatenate([self.shared_upper, [0.0]])
        lo = np.where(a == 0, self.first_lower, lo_table[a])
        hi = np.where(a == self.m - 1, self.last_upper, hi_table[a])
        return lo, hi

    def partition_bounds(self, K) -> tuple[np.ndarray, np.ndarray]:
        return self.interval_bounds(assignment_of(K, self.n))

    @property
    def is_canonical(self) -> bool:
        return bool(np.all(self.b[:-1] >= self.b[1:]))

    def replace(self, **changes) -> Instance:
        fields = dict(
            b=self.b, first_lower=self.first_lower, last_upper=self.last_upper,
            shared_lower=self.shared_lower, shared_upper=self.shared_upper,
            R=self.R, integer=self.integer,
        )
        fields.update(changes)
        return Instance(**fields)


def assignment_of(K, n: int) -> np.ndarray:
    """Interval index of every variable under the non-decreasing partition ``K``.

    Variable ``i`` sits in interval ``j`` iff ``K[j-1] <= i < K[j]`` (with
    ``K[-1] = 0`` and ``K[m-1] = n``), i.e. ``j`` counts the entries of ``K``
    that are ``<= i``.
    """
    K = np.asarray(K, dtype=np.int64)
    return np.searchsorted(K, np.arange(n), side="right")


def canonicalize(inst: Instance) -> tuple[Instance, np.ndarray]:
    """Sort variables by ``b`` non-increasing (stable).

    Returns the sorted instance and ``perm`` with ``perm[k]`` the original index
    of canonical position ``k``; map a canonical solution back with
    ``x_orig[perm] = x``.
    """
    perm = np.argsort(-inst.b, kind="stable")
    return inst.replace(
        b=inst.b[perm], first_lower=inst.first_lower[perm], last_upper=inst.last_upper[perm]
    ), perm


def case_flags(inst: Instance) -> CaseFlags:
    if inst.m == 1:
        return CaseFlags(True, True, True, True)
    sl, su = inst.shared_lower, inst.shared_upper
    max_gap = float(np.max(sl - su))
    return CaseFlags(
        f1=bool(np.all(inst.first_lower[:-1] <= inst.first_lower[1:])),
        f2=bool(np.min(su[0] - inst.first_lower) >= max_gap),
        l1=bool(np.all(inst.last_upper[:-1] <= inst.last_upper[1:])),
        l2=bool(np.min(inst.last_upper - sl[-1]) >= max_gap),
    )


def validate(inst: Instance) -> CaseFlags:
    """Case flags of a canonical instance; raises unless it is solver-admissible."""
    if not inst.is_canonical:
        raise NotCanonicalError("b must be non-increasing; call canonicalize() first")
    flags = case_flags(inst)
    if not flags.admissible:
        raise NotAdmissibleError(flags)
    return flags


def interval_of(inst: Instance, i: int, v: float, tol: float = 0.0) -> int:
    for j in range(inst.m):
        if inst.lower(i, j) - tol <= v <= inst.upper(i, j) + tol:
            return j
    raise GapError(f"x[{i}] = {v!r} lies in no interval")


def eval_objective(inst: Instance, objective: ConvexObjective, x) -> float:
    y = np.asarray(x, dtype=float) + inst.b
    return float(np.sum(objective(y)))


def is_feasible(inst: Instance, x, tol: float = 1e-9) -> bool:
    x = np.asarray(x, dtype=float)
    scale = max(1.0, abs(inst.R), float(np.sum(np.abs(x))))
    if abs(float(np.sum(x)) - inst.R) > inst.n * tol * scale:
        return False
    try:
        for i, v in enumerate(x):
            interval_of(inst, i, float(v), tol * max(1.0, abs(v)))
    except GapError:
        return False
    return True


# --- JSON file format -----------------------------------------------------------

def instance_to_dict(inst: Instance, objective: ConvexObjective = ConvexObjective.QUADRATIC) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "b": inst.b.tolist(),
        "first_lower": inst.first_lower.tolist(),
        "last_upper": inst.last_upper.tolist(),
        "shared_lower": inst.shared_lower.tolist(),
        "shared_upper": inst.shared_upper.tolist(),
        "R": inst.R,
        "objective": ConvexObjective.parse(objective).value,
        "integer": inst.integer,
    }


def instance_from_dict(data: dict) -> tuple[Instance, ConvexObjective]:
    try:
        inst = Instance(
            b=data["b"],
            first_lower=data["first_lower"],
            last_upper=data["last_upper"],
            shared_lower=data.get("shared_lower", []),
            shared_upper=data.get("shared_upper", []),
            R=data["R"],
            integer=data.get("integer", False),
        )
    except KeyError as exc:
        raise LengthMismatchError(f"missing key {exc.args[0]!r}") from None
    if "n" in data and data["n"] != inst.n:
        raise LengthMismatchError(f"n={data['n']} but b has length {inst.n}")
    if "m" in data and data["m"] != inst.m:
        raise LengthMismatchError(f"m={data['m']} but shared bounds imply m={inst.m}")
    return inst, ConvexObjective.parse(data.get("objective", "quadratic"))


def dumps_instance(inst: Instance, objective=ConvexObjective.QUADRATIC) -> str:
    return json.dumps(instance_to_dict(inst, objective), indent=2) + "\n"


def save_instance(path, inst: Instance, objective=ConvexObjective.QUADRATIC) -> None:
    Path(path).write_text(dumps_instance(inst, objective))


def load_instance(path) -> tuple[Instance, ConvexObjective]:
    return instance_from_dict(json.loads(Path(path).read_text()))
