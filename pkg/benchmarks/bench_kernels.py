"""Approval-count kernel: numba vs numpy.

    python3 benchmarks/bench_kernels.py --n 10000000 --repeat 5

Both backends must return identical counts; the script checks that before
timing anything.  The first numba call (compilation or cache load) is
reported separately.
"""
import argparse
import math
import time

from veilvote._accel import HAVE_NUMBA
from veilvote.kernels import approval_counts
from veilvote.model import ModelParams, solve_equilibrium

P = ModelParams(0.6, 0.25, 1.0, 35.0, 3.0)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    tau = solve_equilibrium(P).t_star
    sa, sb = math.exp(-P.lambda_a * tau), math.exp(-P.lambda_b * tau)
    run = lambda backend: approval_counts(7, args.n, P.p0, sa, sb, args.workers, backend)

    ref = run("numpy")
    print(f"n={args.n:,} workers={args.workers} counts={ref}")
    t_np = best_of(lambda: run("numpy"), args.repeat)
    print(f"numpy  {t_np * 1e3:9.1f} ms  {args.n / t_np / 1e6:7.1f} M rep/s")
    if not HAVE_NUMBA:
        print("numba not installed; skipped")
        return
    t0 = time.perf_counter()
    assert run("numba") == ref, "backends disagree"
    print(f"numba first call {(time.perf_counter() - t0) * 1e3:.1f} ms")
    t_nb = best_of(lambda: run("numba"), args.repeat)
    print(f"numba  {t_nb * 1e3:9.1f} ms  {args.n / t_nb / 1e6:7.1f} M rep/s  ({t_np / t_nb:.1f}x)")


if __name__ == "__main__":
    main()
