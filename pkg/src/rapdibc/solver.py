"""One-call solving of instances given in any variable order."""

from __future__ import annotations

import numpy as np

from .instance import ConvexObjective, Instance, canonicalize
from .integer import solve_integer
from .sweep import Solution, solve


def solve_instance(inst: Instance, objective=ConvexObjective.QUADRATIC, *, integer: bool | None = None,
                   workers=None, keep_log=False) -> Solution:
    """Canonicalize, solve and return ``x`` in the caller's variable order.

    ``integer`` defaults to the instance's own flag. The returned
    ``partition`` refers to the canonical (b-sorted) order.
    """
    integer = inst.integer if integer is None else integer
    if integer and not inst.integer:
        inst = inst.replace(integer=True)
    canon, perm = canonicalize(inst)
    run = solve_integer if integer else solve
    sol = run(canon, objective, workers=workers, keep_log=keep_log)
    if sol.x is not None:
        x = np.empty_like(sol.x)
        x[perm] = sol.x
        sol.x = x
    return sol
