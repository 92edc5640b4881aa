"""Wall-clock comparison of the numba and numpy backends.

    python3 benchmarks/bench_backends.py [--slots 20000] [--repeat 3]

Each backend runs the same configurations; the first numba call is a warm-up
so compilation is excluded.
"""
import argparse
import time

import numpy as np

from sdfsim import _kernels
from sdfsim.analysis import monte_carlo_expected_m
from sdfsim.engine import run
from sdfsim.model import UNIFORM5_PROBS, discrete_config, jakes_config


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    n = args.slots
    cases = {
        "discrete sdf run": lambda b: run(discrete_config(20, UNIFORM5_PROBS, 0.02, 6.0, horizon=n,
                                                          warmup=n // 10, seed=1), backend=b),
        "jakes sdf run": lambda b: run(jakes_config(20, 0.02, 12.0, horizon=n, warmup=n // 10, seed=1),
                                       backend=b),
        "monte carlo E[M]": lambda b: monte_carlo_expected_m(discrete_config(20, UNIFORM5_PROBS, 0.02), 10 * n,
                                                             np.random.default_rng(0), backend=b),
    }
    print(f"{'case':<20s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        fn("numba")
        tn = best_of(lambda: fn("numba"), args.repeat)
        tp = best_of(lambda: fn("numpy"), args.repeat)
        print(f"{name:<20s} {tn:10.4f} {tp:10.4f} {tp / tn:7.1f}x")


if __name__ == "__main__":
    main()
