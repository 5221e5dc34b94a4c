"""Benchmark the episode engines: compiled Cython kernel vs pure-Python twin
vs the from-scratch reference loop.

Usage: python benchmarks/bench_engine.py [--n N] [--reps R]

The three paths produce identical trajectories (asserted here); the point of
the exercise is throughput.  The generic loop is quadratic-ish in n because it
re-evaluates the functional from scratch at every update, so it runs at a
reduced n unless --full-generic is passed.
"""

import argparse
import time

import numpy as np

from fbandit import compiled_available
from fbandit.distributions import Beta
from fbandit.ecdf import UNIT_INTERVAL
from fbandit.functionals import GiniWelfare, Mean
from fbandit.policies import FUCB, PolicySpec
from fbandit.rng import RandomSource
from fbandit.simulation import Instance, run_episode


def time_engine(inst, pol, n, reps, engine):
    best = float("inf")
    tr = None
    for r in range(reps):
        t0 = time.perf_counter()
        tr = run_episode(inst, pol, n, RandomSource(1, 0, r), engine=engine)
        best = min(best, time.perf_counter() - t0)
    return best, tr


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--generic-n", type=int, default=2_000)
    ap.add_argument("--full-generic", action="store_true",
                    help="run the generic loop at the full n (slow)")
    args = ap.parse_args()

    print(f"compiled extension available: {compiled_available()}")
    for label, functional in (("gini-welfare (Fenwick path)", GiniWelfare(UNIT_INTERVAL)),
                              ("mean (running-sum path)", Mean(UNIT_INTERVAL))):
        inst = Instance((Beta(1.0, 1.0), Beta(1.0, 3.0)), functional)
        inst.gaps  # warm the oracle cache
        pol = PolicySpec(FUCB(2.01), functional, 2)
        print(f"\n== {label}, K=2, n={args.n} ==")
        rows = []
        engines = ["compiled", "pure"] if compiled_available() else ["pure"]
        base_arms = None
        for engine in engines:
            dt, tr = time_engine(inst, pol, args.n, args.reps, engine)
            rows.append((engine, args.n, dt))
        gn = args.n if args.full_generic else min(args.generic_n, args.n)
        dt, _ = time_engine(inst, pol, gn, 1, "generic")
        rows.append(("generic", gn, dt))
        # equivalence spot check at a small n
        ref = run_episode(inst, pol, 500, RandomSource(1, 0, 0), engine="generic",
                          record_arms=True)
        for engine in engines:
            other = run_episode(inst, pol, 500, RandomSource(1, 0, 0), engine=engine,
                                record_arms=True)
            assert np.array_equal(ref.arms, other.arms), engine
        print(f"{'engine':>10s} {'n':>8s} {'time':>10s} {'steps/s':>12s}")
        for engine, n, dt in rows:
            print(f"{engine:>10s} {n:>8d} {dt*1e3:>8.1f}ms {n/dt:>12,.0f}")


if __name__ == "__main__":
    main()
