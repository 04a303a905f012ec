"""Time the compiled transport kernel against the numpy fallback.

The hot loop in curved-chart work is the fixed-step endpoint shoot: every
world-function evaluation re-integrates a geodesic, and the connector calls
it dozens of times per point pair.  This script times shoot_endpoint in both
backends on identical work and then times world_function end to end under
whichever backend the package selected at import.

Run:  python3 benchmarks/bench_kernels.py [--steps N] [--shots M] [--repeats R]
"""

import argparse
import time

import numpy as np

from conerec import _kernels_py
from conerec import transport as tr
from conerec._backend import BACKEND, kernels

try:
    from conerec import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _shot_args(rng, kind, eps, width, steps):
    p = rng.uniform(-0.5, 0.5, 4)
    v = rng.uniform(-1.0, 1.0, 4)
    return (kind, eps, width, np.zeros(4), np.full(4, -10.0),
            np.full(4, 10.0), p, v, 1.0, steps)


def time_backend(mod, shots, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in shots:
            mod.shoot_endpoint(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=48)
    ap.add_argument("--shots", type=int, default=400)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    shots = [_shot_args(rng, 1, 1e-2, 2.0, args.steps)
             for _ in range(args.shots)]

    t_py = time_backend(_kernels_py, shots, args.repeats)
    print(f"shoot_endpoint x{args.shots} ({args.steps} steps each)")
    print(f"  numpy fallback : {t_py * 1e3:9.2f} ms")
    if _kernels_c is not None:
        t_c = time_backend(_kernels_c, shots, args.repeats)
        print(f"  compiled       : {t_c * 1e3:9.2f} ms   ({t_py / t_c:.1f}x)")
    else:
        print("  compiled       : unavailable (extension not built)")

    chart = tr.make_chart("conformal", eps=1e-2)
    p = np.array([0.1, -0.2, 0.3, 0.05])
    q = np.array([1.4, 0.3, -0.1, 0.4])
    t0 = time.perf_counter()
    for _ in range(20):
        tr.world_function(chart, p, q)
    t_wf = (time.perf_counter() - t0) / 20
    print(f"world_function (active backend: {BACKEND}) : {t_wf * 1e3:.2f} ms/call")

    same = kernels is _kernels_c if _kernels_c is not None else kernels is _kernels_py
    print(f"active backend module matches selection: {same}")


if __name__ == "__main__":
    main()
