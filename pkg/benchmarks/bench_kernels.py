"""Compare the compiled jet kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeat R]
"""

import argparse
import time

import numpy as np

from pinncert import _kernels_py
from pinncert.jets import IndexSet, tanh_coeffs

try:
    from pinncert import _kernels
except ImportError:  # extension not built
    _kernels = None

CASES = {
    "2 vars, total order 4": IndexSet.total(2, 4),
    "2 vars, t^2 x^4 axes": IndexSet.axes((2, 4)),
    "3 vars, total order 3": IndexSet.total(3, 3),
}


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(mod, iset, n, repeat, rng):
    nc = len(iset)
    a = rng.standard_normal((nc, n))
    b = rng.standard_normal((nc, n))
    delta = a.copy()
    delta[0] = 0.0
    ck = np.ascontiguousarray(tanh_coeffs(b[0], iset.degree))
    lim = iset.nz_limits
    out = np.zeros((nc, n))
    R = np.zeros((iset.degree + 1, nc, n))
    gd = np.zeros((nc, n))
    gck = np.zeros((iset.degree + 1, n))
    mod.compose_forward(delta, ck, iset.ia_nz, iset.ib_nz, iset.ic_nz, lim, R)
    return {
        "mul": _best(lambda: mod.mul(a, b, iset.ia, iset.ib, iset.ic, out), repeat),
        "compose_apply": _best(lambda: mod.compose_apply(delta, ck, iset.ia_nz, iset.ib_nz, iset.ic_nz, lim, out),
                               repeat),
        "compose_forward": _best(lambda: mod.compose_forward(delta, ck, iset.ia_nz, iset.ib_nz, iset.ic_nz, lim, R),
                                 repeat),
        "compose_backward": _best(lambda: mod.compose_backward(a, delta, R, iset.ia_nz, iset.ib_nz, iset.ic_nz, lim,
                                                               gd, gck), repeat),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'case':28s} {'kernel':18s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, iset in CASES.items():
        py = bench(_kernels_py, iset, args.points, args.repeat, rng)
        cy = bench(_kernels, iset, args.points, args.repeat, rng) if _kernels else None
        for k, t in py.items():
            if cy:
                print(f"{name:28s} {k:18s} {1e3 * t:10.2f} {1e3 * cy[k]:10.2f} {t / cy[k]:8.1f}x")
            else:
                print(f"{name:28s} {k:18s} {1e3 * t:10.2f} {'n/a':>10s}")


if __name__ == "__main__":
    main()
