"""Throughput comparison of the two annealing kernels.

Builds a lowered model of tunable size, runs the identical read batch
through the compiled extension and the pure-Python mirror, verifies the
outputs are bit-identical, and reports wall time and flip-attempt rate.

    python3 benchmarks/bench_sa.py --vars 64 --reads 32 --sweeps 2000
"""

import argparse
import time

import numpy as np

from bittp._kernels import KERNEL, pure

try:
    from bittp._kernels import _sa_core
except ImportError:
    _sa_core = None


def build_problem(num_vars: int, density: float, seed: int):
    rng = np.random.default_rng(seed)
    neighbors = [dict() for _ in range(num_vars)]
    for i in range(num_vars):
        for j in range(i + 1, num_vars):
            if rng.random() < density:
                c = float(rng.normal())
                neighbors[i][j] = c
                neighbors[j][i] = c
    row_ptr = np.zeros(num_vars + 1, dtype=np.int64)
    col_idx, values = [], []
    for i in range(num_vars):
        row_ptr[i + 1] = row_ptr[i] + len(neighbors[i])
        for j in sorted(neighbors[i]):
            col_idx.append(j)
            values.append(neighbors[i][j])
    return (row_ptr, np.asarray(col_idx, dtype=np.int64),
            np.asarray(values), rng.normal(size=num_vars))


def bench(kernel, args_tuple, repeats: int):
    best = np.inf
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = kernel(*args_tuple)
        best = min(best, time.perf_counter() - start)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vars", type=int, default=64)
    ap.add_argument("--reads", type=int, default=32)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=3)
    opts = ap.parse_args()

    row_ptr, col_idx, values, linear = build_problem(
        opts.vars, opts.density, opts.seed)
    betas = np.geomspace(0.05, 20.0, opts.sweeps)
    seeds = np.random.default_rng(opts.seed + 1).integers(
        1, 2**63, size=opts.reads, dtype=np.uint64)
    args_tuple = (opts.vars, row_ptr, col_idx, values, linear, betas, seeds)
    attempts = opts.reads * opts.sweeps * opts.vars

    print(f"default kernel: {KERNEL}")
    print(f"{opts.vars} vars, {opts.reads} reads, {opts.sweeps} sweeps, "
          f"{len(values)} couplings ({attempts:,} flip attempts)")

    pure_out, pure_t = bench(pure.run_reads, args_tuple, opts.repeats)
    print(f"pure:     {pure_t * 1e3:10.1f} ms   "
          f"{attempts / pure_t / 1e6:8.2f} M attempts/s")

    if _sa_core is None:
        print("compiled: not built (pip install -e . rebuilds it)")
        return

    comp_out, comp_t = bench(_sa_core.run_reads, args_tuple, opts.repeats)
    print(f"compiled: {comp_t * 1e3:10.1f} ms   "
          f"{attempts / comp_t / 1e6:8.2f} M attempts/s")
    print(f"speedup:  {pure_t / comp_t:10.1f}x")

    if not np.array_equal(pure_out, comp_out):
        raise SystemExit("kernel outputs diverged; the mirrors are out of sync")
    print("outputs bit-identical across kernels")


if __name__ == "__main__":
    main()
