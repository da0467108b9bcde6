"""Time the compiled kernels against the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py``.  Both backends are imported
directly, so the result does not depend on ``ATOMCHIP_PURE_PYTHON``.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from atomchip import _kernels_py

try:
    from atomchip import _kernels
except ImportError:  # extension not built
    _kernels = None


def _gl(lo, hi, order, panels):
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * np.diff(edges)[:, None]
    return (mid + half * t).ravel(), (half * w).ravel()


def geometry_case(nx_panels: int):
    xs, wx = _gl(-50e-6, 50e-6, 12, nx_panels)
    ys, wy = _gl(-25e-9, 25e-9, 12, 4)
    zs, wz = _gl(-25e-9, 25e-9, 12, 4)
    p1 = np.array([0.0, 0.0, 0.5e-6])
    p2 = np.array([0.3e-6, 0.0, 0.5e-6])
    return (p1, p2, xs, wx, ys, wy, zs, wz)


def transverse_case(ncell: int):
    rng = np.random.default_rng(0)
    xs = np.linspace(-20e-6, 20e-6, ncell)
    wx = np.full(ncell, xs[1] - xs[0])
    ys = rng.uniform(-25e-9, 25e-9, (ncell, 8))
    wy = np.full((ncell, 8), 50e-9 / 8)
    zs, wz = _gl(-25e-9, 25e-9, 4, 1)
    jy = rng.normal(size=(ncell, 8))
    xobs = np.linspace(0, 2e-6, 16)
    return (xobs, 0.5e-6, xs, wx, ys, wy, zs, wz, jy)


def bench(func, args, repeat):
    best = min(timeit.repeat(lambda: func(*args), number=1, repeat=repeat))
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    cases = [
        ("geometry_tensor", "geometry_tensor", geometry_case(40)),
        ("geometry_tensor (large)", "geometry_tensor", geometry_case(200)),
        ("transverse_field", "transverse_field", transverse_case(2000)),
    ]
    print(f"{'kernel':28s} {'numpy [ms]':>12s} {'cython [ms]':>12s} {'speed-up':>9s} {'max rel diff':>13s}")
    for label, fname, case in cases:
        ref_f = getattr(_kernels_py, fname)
        t_py = bench(ref_f, case, args.repeat)
        if _kernels is None:
            print(f"{label:28s} {t_py * 1e3:12.2f} {'n/a':>12s}")
            continue
        fast_f = getattr(_kernels, fname)
        t_cy = bench(fast_f, case, args.repeat)
        a, b = np.asarray(ref_f(*case)), np.asarray(fast_f(*case))
        diff = float(np.max(np.abs(a - b)) / np.max(np.abs(a)))
        print(f"{label:28s} {t_py * 1e3:12.2f} {t_cy * 1e3:12.2f} {t_py / t_cy:9.1f} {diff:13.1e}")


if __name__ == "__main__":
    main()
