#!/usr/bin/env python3
"""
Timing of the transform paths on a window of 256 lattice points.

Compares the direct (compensated) summation under both kernel backends with
the FFT path, for q=0.5 and q=0.8, and times one full CWT.

    python3 benchmarks/bench_kernels.py [--repeat 30]
"""
import argparse
import timeit

import numpy as np

import qbessel as qb
from qbessel import _accel
from qbessel.verify import band_limited_signal


def best(fn, number, repeat):
    fn()  # warm-up, includes numba compilation on first use
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench_config(q, alpha, n_index, n_min, repeat):
    grid = qb.build_grid(q, n_min, n_min + 255)
    plan = qb.make_plan(grid, qb.VParams(alpha, n_index))
    f = qb.LatticeFn(grid, np.random.default_rng(0).standard_normal(grid.size))
    rows = {}
    saved = _accel.backend
    try:
        for backend in filter(None, (_accel.NUMBA_BACKEND, _accel.NUMPY_BACKEND)):
            _accel.backend = backend
            rows[f"direct ({backend.name})"] = best(lambda: qb.fourier_qv(f, plan), 10, repeat)
    finally:
        _accel.backend = saved
    rows["fft"] = best(lambda: qb.fourier_fast(f, plan), 10, repeat)
    return rows


def bench_cwt(repeat):
    cfg = qb.Config()
    plan = qb.make_plan(cfg.grid(), cfg.vparams())
    b0, _ = plan.safe_band
    w = qb.make_wavelet_from_fourier(qb.bump_spec(b0, b0 + 2), plan)
    f = band_limited_signal(plan, np.random.default_rng(1))
    return {"cwt direct": best(lambda: qb.cwt(f, w, plan), 1, repeat),
            "cwt fft": best(lambda: qb.cwt_fast(f, w, plan), 1, repeat)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--repeat", type=int, default=30)
    args = ap.parse_args()
    print(f"active backend: {_accel.backend.name}")
    for q, alpha, n_index, n_min in ((0.5, 0.5, 1, -5), (0.8, 1.5, 1, -12)):
        rows = bench_config(q, alpha, n_index, n_min, args.repeat)
        print(f"\nq={q} alpha={alpha} n={n_index}, N=256")
        for name, t in rows.items():
            print(f"  {name:16s} {t * 1e6:10.1f} us   ratio to fft {t / rows['fft']:6.1f}")
    print("\ndefault config, full scalogram (direct path reuses the cached atom bank)")
    for name, t in bench_cwt(max(3, args.repeat // 10)).items():
        print(f"  {name:16s} {t * 1e3:10.2f} ms")


if __name__ == "__main__":
    main()
