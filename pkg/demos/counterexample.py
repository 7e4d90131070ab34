"""The best on/off pattern depends on the objective.

Every variable is either off (0) or on in [L, nL], and the total is nL.
Under the quadratic objective all variables switch on; under the hinge
objective max(0, x + b) variable 0 stays off, and the quadratic schedule
costs strictly more. Any method that picks the on/off pattern once for all
convex objectives therefore cannot be exact.

    python3 demos/counterexample.py [n] [L] [eps]
"""

import sys

from rapdibc import ConvexObjective, counterexample_instance, eval_objective, solve

args = [float(a) for a in sys.argv[1:]]
n = int(args[0]) if args else 3
L = args[1] if len(args) > 1 else 1.0
eps = args[2] if len(args) > 2 else 0.1
inst = counterexample_instance(n, L, eps)
print(f"n={n}, L={L:g}, eps={eps:g}; b = {inst.b.round(4).tolist()}, R = {inst.R:g}\n")

sols = {phi: solve(inst, phi) for phi in ConvexObjective}
print(f"{'objective':10s} {'optimum':>9s}  {'x':30s}")
for phi, sol in sols.items():
    print(f"{phi.value:10s} {sol.objective:9.4f}  {sol.x.round(4).tolist()}")

xq = sols[ConvexObjective.QUADRATIC].x
print("\nquadratic schedule evaluated under each objective:")
for phi, sol in sols.items():
    cost = eval_objective(inst, phi, xq)
    print(f"  {phi.value:10s} {cost:9.4f}  (optimum {sol.objective:.4f}, excess {cost - sol.objective:.4f})")
