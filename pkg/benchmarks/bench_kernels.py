#!/usr/bin/env python3
"""Benchmark the compiled simplex kernels against the pure numpy fallback.

Times raw kernel operations, full LP solves and a branch-and-bound solve on
each backend and checks that the two produce bit-identical results.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from mipseries.kernels import HAVE_COMPILED, get_kernels
from mipseries.lp import LpProblem, solve_lp
from mipseries.model import LinearRow, MipInstance, Sense
from mipseries.solver import SolverConfig, solve


def _random_instance(rng, n, m, integer=True):
    c = rng.integers(-9, 10, n).astype(float)
    A = rng.integers(-4, 5, (m, n)).astype(float)
    A[rng.random((m, n)) < 0.2] = 0.0
    z = rng.integers(0, 3, n).astype(float)
    rows = []
    for i in range(m):
        act = float(A[i] @ z)
        rows.append(LinearRow(f"r{i}", tuple((j, A[i, j]) for j in range(n) if A[i, j]),
                              Sense.LE, act + float(rng.integers(1, 5))))
    ints = frozenset(range(n)) if integer else frozenset()
    return MipInstance("bench", tuple(f"x{j}" for j in range(n)), c,
                       np.zeros(n), np.full(n, 3.0), ints, tuple(rows))


def bench_eliminate(kernels, reps=200, m=60, ncol=200, seed=0):
    rng = np.random.default_rng(seed)
    tab0 = rng.standard_normal((m, ncol))
    rhs0 = rng.standard_normal(m)
    start = time.perf_counter()
    for rep in range(reps):
        tab = np.ascontiguousarray(tab0)
        rhs = rhs0.copy()
        kernels.eliminate(tab, rhs, rep % m, rep % ncol)
    return time.perf_counter() - start, tab, rhs


def bench_lp(kernels, reps=60, seed=1):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    results = []
    for rep in range(reps):
        inst = _random_instance(rng, n=40, m=25, integer=False)
        res = solve_lp(LpProblem(inst), kernels=kernels)
        results.append((res.status.name, res.objective, res.iterations))
    return time.perf_counter() - start, results


def bench_bb(kernels_name, reps=8, seed=2):
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(det_work_per_second=1e9, kernels=kernels_name)
    start = time.perf_counter()
    results = []
    for rep in range(reps):
        inst = _random_instance(rng, n=12, m=8)
        out = solve(inst, cfg, 1e6)
        results.append((out.status.name, out.primal_bound, out.stats.nodes,
                        out.stats.lp_iterations))
    return time.perf_counter() - start, results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="fewer repetitions")
    args = parser.parse_args()

    if not HAVE_COMPILED:
        print("compiled kernels are not built; run 'pip install -e .' first")
        return

    scale = 0.25 if args.quick else 1.0
    compiled = get_kernels("compiled")
    python = get_kernels("python")

    print(f"{'benchmark':<22}{'compiled':>12}{'python':>12}{'speedup':>10}  identical")
    te_c, tab_c, rhs_c = bench_eliminate(compiled, reps=int(200 * scale))
    te_p, tab_p, rhs_p = bench_eliminate(python, reps=int(200 * scale))
    same = np.array_equal(tab_c, tab_p) and np.array_equal(rhs_c, rhs_p)
    print(f"{'pivot elimination':<22}{te_c:>11.4f}s{te_p:>11.4f}s{te_p / te_c:>9.1f}x  {same}")

    tl_c, res_c = bench_lp(compiled, reps=int(60 * scale) or 1)
    tl_p, res_p = bench_lp(python, reps=int(60 * scale) or 1)
    print(f"{'lp solves':<22}{tl_c:>11.4f}s{tl_p:>11.4f}s{tl_p / tl_c:>9.1f}x  {res_c == res_p}")

    tb_c, out_c = bench_bb("compiled", reps=int(8 * scale) or 1)
    tb_p, out_p = bench_bb("python", reps=int(8 * scale) or 1)
    print(f"{'branch and bound':<22}{tb_c:>11.4f}s{tb_p:>11.4f}s{tb_p / tb_c:>9.1f}x  {out_c == out_p}")


if __name__ == "__main__":
    main()
