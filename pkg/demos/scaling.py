"""Solve time on synthetic instances as n grows, for m = 2, 3, 4 intervals.

"Pairs visited" counts (sub-partition, last split point) combinations the
sweep processed or skipped; running time also depends on how many of them
are feasible, so it varies with the seed.

    python3 demos/scaling.py
"""

import time

from rapdibc import SyntheticGenConfig, gen_synthetic, solve

SIZES = {2: [1_000, 10_000, 100_000], 3: [100, 300, 1_000], 4: [30, 60, 100]}

for m, sizes in SIZES.items():
    prev = None
    for n in sizes:
        inst = gen_synthetic(SyntheticGenConfig(n, m, seed=1))
        t0 = time.perf_counter()
        sol = solve(inst)
        secs = time.perf_counter() - t0
        growth = f"x{secs / prev:6.1f}" if prev else ""
        print(f"m={m} n={n:>7d}  {secs:8.3f}s  {growth:8s} pairs visited "
              f"{sol.record.pairs:>9d}  status {sol.status.value}")
        prev = secs
