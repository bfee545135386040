"""Time the numba kernels against their pure-numpy twins.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each kernel
is warmed up once (so numba compile time is excluded), timed as the best
of ``--repeat`` runs, and its outputs are compared between backends.
"""
import argparse
import time

import numpy as np

from eegscreen.kernels import get_backend


def _cases(rng):
    pts = rng.standard_normal((2000, 10))
    times = np.arange(2000, dtype=np.int64) * 25
    radii = np.geomspace(0.5, 8.0, 24)
    k = rng.standard_normal((200, 200))
    x = rng.standard_normal((200, 5))
    y = np.where(x[:, 0] + 0.3 * rng.standard_normal(200) > 0, 1.0, -1.0)
    gram = np.exp(-0.1 * ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
    z = np.cumsum(rng.standard_normal(20000))
    return {
        "pair_counts (M=2000, m=10)": lambda b: b.pair_counts(pts, times, radii, 25),
        "lorenz_rk4 (51000 steps)": lambda b: b.lorenz_rk4(np.array([1.0, 1.0, 1.0]), 10.0, 28.0, 8.0 / 3.0,
                                                           0.01, 50000, 1000),
        "kalman_random_walk (20000)": lambda b: b.kalman_random_walk(z, 0.01, 1.0, z[0], 1.0),
        "kalman_smooth (20000)": lambda b: b.kalman_smooth(z, 0.01, 1.0, z[0], 1.0),
        "smo_solve (n=200, rbf)": lambda b: b.smo_solve(gram, y, 2.0, 1e-3, 100000),
    }


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _max_diff(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return max(float(np.max(np.abs(np.asarray(u, dtype=np.float64) - np.asarray(v, dtype=np.float64))))
               for u, v in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast, slow = get_backend("numba"), get_backend("numpy")
    print(f"{'kernel':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, case in _cases(np.random.default_rng(0)).items():
        case(fast)  # compile
        t_fast, out_fast = _best(lambda: case(fast), args.repeat)
        t_slow, out_slow = _best(lambda: case(slow), args.repeat)
        print(f"{name:32s} {1e3 * t_fast:10.2f} {1e3 * t_slow:10.2f} {t_slow / t_fast:8.1f} "
              f"{_max_diff(out_fast, out_slow):11.2e}")


if __name__ == "__main__":
    main()
