"""Command-line interface: ``rapdibc {solve,generate,verify,bench}``.

Exit codes: 0 success, 2 bad arguments or input, 3 infeasible instance,
4 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .exceptions import CapExceededError, RapError
from .generators import EV_ENERGY_WH, EvGenConfig, SyntheticGenConfig, gen_ev, gen_synthetic
from .instance import ConvexObjective, canonicalize, dumps_instance, load_instance
from .oracle import algorithm1, brute_force, brute_force_integer
from .solver import solve_instance

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_MISMATCH = 4

BENCH_HEADER = ["m", "n", "rep", "seed", "wall_seconds", "objective", "status"]
VERIFY_REL_TOL = 1e-8


def _num(v):
    """JSON-safe float: non-finite values become ``null``."""
    v = float(v)
    return v if math.isfinite(v) else None


def solution_to_dict(sol, objective: ConvexObjective, integer: bool) -> dict:
    x = None
    if sol.x is not None:
        x = [int(v) for v in sol.x] if integer else [float(v) for v in sol.x]
    return {
        "status": sol.status.value,
        "objective": _num(sol.objective),
        "objective_function": objective.value,
        "integer": integer,
        "lambda": _num(sol.lam),
        "partition": [int(k) for k in sol.partition],
        "x": x,
    }


def dumps_solution(sol, objective: ConvexObjective, integer: bool) -> str:
    return json.dumps(solution_to_dict(sol, objective, integer), indent=2, sort_keys=True) + "\n"


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- subcommands --------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst, objective = load_instance(args.instance)
    if args.objective:
        objective = ConvexObjective.parse(args.objective)
    integer = args.integer or inst.integer
    sol = solve_instance(inst, objective, integer=integer, workers=args.workers)
    _write(dumps_solution(sol, objective, integer), args.out)
    return EXIT_OK if sol.optimal else EXIT_INFEASIBLE


def cmd_generate(args) -> int:
    if args.kind == "synthetic":
        inst = gen_synthetic(SyntheticGenConfig(args.n, args.m, args.seed))
    else:
        energy = args.energy_wh
        if energy is None:
            energy = EV_ENERGY_WH[np.random.default_rng(args.seed).integers(len(EV_ENERGY_WH))]
        profile = None
        if args.profile:
            profile = tuple(float(v) for v in json.loads(Path(args.profile).read_text()))
        cfg = EvGenConfig.from_wh(energy, T=args.T, dt=args.dt, x_min=args.x_min,
                                  x_max=args.x_max, profile=profile, seed=args.seed)
        inst = gen_ev(cfg, canonical=False)
    _write(dumps_instance(inst, args.objective), args.out)
    return EXIT_OK


def _agree(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= VERIFY_REL_TOL * max(1.0, abs(a), abs(b))


def cmd_verify(args) -> int:
    inst, objective = load_instance(args.instance)
    objectives = ([ConvexObjective.parse(args.objective)] if args.objective
                  else list(ConvexObjective))
    canon, _ = canonicalize(inst)
    ok = True
    for phi in objectives:
        main = solve_instance(canon, phi, integer=False)
        checks = [("algorithm1", algorithm1), ("brute_force", brute_force)]
        if canon.integer:
            checks.append(("brute_force_integer", brute_force_integer))
        for name, oracle in checks:
            if name == "brute_force_integer":
                ref_main = solve_instance(canon, phi, integer=True).objective
            else:
                ref_main = main.objective
            try:
                ref = oracle(canon, phi, cap=args.cap).objective
            except CapExceededError:
                print(f"{phi.value:9s} {name:20s} skipped (over cap)")
                continue
            good = _agree(ref_main, ref)
            ok &= good
            print(f"{phi.value:9s} {name:20s} sweep={ref_main!r} oracle={ref!r} "
                  f"{'agree' if good else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_MISMATCH


def _bench_one(job):
    m, n, rep, seed = job
    inst = gen_synthetic(SyntheticGenConfig(n, m, seed))
    t0 = time.perf_counter()
    sol = solve_instance(inst, ConvexObjective.QUADRATIC)
    wall = time.perf_counter() - t0
    return [m, n, rep, seed, f"{wall:.6f}", repr(float(sol.objective)), sol.status.value]


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    jobs = [(args.m, n, rep, args.seed + rep) for n in sizes for rep in range(args.reps)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            rows = list(ex.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    if args.out is None or args.out == "-":
        fh = sys.stdout
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_HEADER)
        writer.writerows(rows)
    else:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(BENCH_HEADER)
            writer.writerows(rows)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------

def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rapdibc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--integer", action="store_true", help="require integer x")
    s.add_argument("--objective", choices=["q", "quadratic", "abs", "hinge"],
                   help="override the file's objective")
    s.add_argument("--out", help="solution file (default: stdout)")
    s.add_argument("--workers", type=_positive_int, default=1,
                   help="processes for the partition sweep")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("generate", help="write a random instance file")
    gsub = g.add_subparsers(dest="kind", required=True)
    gs = gsub.add_parser("synthetic", help="scalability benchmark instance")
    gs.add_argument("--n", type=_positive_int, required=True)
    gs.add_argument("--m", type=int, required=True, choices=range(2, 65), metavar="M")
    ge = gsub.add_parser("ev", help="EV charging with minimum power")
    ge.add_argument("--energy-wh", type=float,
                    help=f"energy demand in Wh (default: seeded pick from {EV_ENERGY_WH})")
    ge.add_argument("--T", type=_positive_int, default=56, help="number of time slots")
    ge.add_argument("--dt", type=float, default=0.25, help="slot length in hours")
    ge.add_argument("--x-min", type=float, default=1.1, help="minimum charging power, kW")
    ge.add_argument("--x-max", type=float, default=6.6, help="maximum charging power, kW")
    ge.add_argument("--profile", help="JSON array of T base-load values in kW")
    for q in (gs, ge):
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--objective", choices=["quadratic", "abs", "hinge"], default="quadratic")
        q.add_argument("--out", help="instance file (default: stdout)")
        q.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="compare the sweep against the exhaustive oracles")
    v.add_argument("instance")
    v.add_argument("--objective", choices=["quadratic", "abs", "hinge"],
                   help="check one objective (default: all)")
    v.add_argument("--cap", type=int, default=10**6, help="enumeration cap for the oracles")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time the solver on synthetic instances")
    b.add_argument("--m", type=int, required=True, choices=[2, 3, 4])
    b.add_argument("--sizes", required=True, help="comma-separated list of n")
    b.add_argument("--reps", type=_positive_int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=_positive_int, default=1,
                   help="repetitions run concurrently; each solve is timed on its own")
    b.add_argument("--out", help="CSV file (default: stdout)")
    b.set_defaults(func=cmd_bench)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (RapError, ValueError, KeyError, OSError) as exc:
        print(f"rapdibc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
