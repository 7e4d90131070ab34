"""Integer solutions by rounding the continuous multiplier.

For integer data the continuous optimum of a partition sits at a multiplier
lam where every free variable takes x_i = lam - b_i. Rounding lam down and
lifting just enough free variables by one restores the exact integer total;
the demo compares the result with exhaustive enumeration of integer points.

    python3 demos/integer_rounding.py [seed]
"""

import sys

import numpy as np

from rapdibc import ConvexObjective, brute_force_integer, random_instance, solve, solve_integer

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
rng = np.random.default_rng(seed)
shown = 0
while shown < 5:
    inst = random_instance(rng, int(rng.integers(3, 6)), 2, integer=True, max_bound=8)
    cont = solve(inst)
    if not cont.optimal or float(cont.lam).is_integer():  # show cases that need rounding
        continue
    shown += 1
    print(f"b={inst.b.astype(int).tolist()} lower={inst.first_lower.astype(int).tolist()} "
          f"upper={inst.last_upper.astype(int).tolist()} "
          f"gap=({inst.shared_upper[0]:g}, {inst.shared_lower[0]:g}) R={inst.R:g}")
    print(f"  continuous  V={cont.objective:8.3f}  lam={cont.lam:.3f}  x={cont.x.round(3).tolist()}")
    for phi in ConvexObjective:
        sol, ref = solve_integer(inst, phi), brute_force_integer(inst, phi)
        tag = "==" if sol.objective == ref.objective else "!="
        print(f"  {phi.value:9s}   V={sol.objective:8.3f}  x={sol.x.astype(int).tolist()}  "
              f"{tag} enumeration {ref.objective:.3f}")
    print()
