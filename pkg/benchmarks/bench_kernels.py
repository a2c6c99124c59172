"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import time

import numpy as np

from bergman_sf import _kernels
from bergman_sf.interaction import SpaceParams, coefficients
from bergman_sf.optimize import interaction_table


def _best(fn, repeat):
    fn()  # warm-up (JIT compilation for numba)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    p = SpaceParams(2, 3.0)
    rng = np.random.default_rng(0)
    coeffs = coefficients(p, np.arange(2, 200_002, dtype=float))
    thetas = rng.uniform(0.01, 2 * math.pi - 0.01, 256)
    lengths = np.full(thetas.size, coeffs.size, dtype=np.int64)
    angles = np.sort(rng.uniform(0, 2 * math.pi, 20))
    h, f, d1, d2 = interaction_table(p)
    x0 = np.concatenate([[0.0], np.sort(rng.uniform(0, 2 * math.pi, 7))])
    return {
        "trig_sum 256 x 2e5": lambda: _kernels.trig_sum(coeffs, 2, thetas, lengths),
        "power_sums n=20 M=1e5": lambda: _kernels.power_sums(angles, 100_000),
        "table_energy n=8": lambda: _kernels.table_energy(x0, h, f, d1, d2),
        "descent n=8": lambda: _kernels.descent(x0, h, f, d1, d2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [b for b in _kernels.BACKENDS if b != "numba" or _kernels.HAS_NUMBA]
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speed-up':>10}")
    for name, fn in cases().items():
        row = {}
        for b in backends:
            with _kernels.use_backend(b):
                row[b] = _best(fn, args.repeat)
        cells = "".join(f"{row[b] * 1e3:>10.3f}ms" for b in backends)
        ratio = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        print(f"{name:<24}{cells}{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
