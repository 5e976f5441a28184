"""Benchmark: compiled stencil kernels against the numpy fallback.

Run as: python benchmarks/bench_stencil.py [points_per_axis]
"""

import sys
import time

import numpy as np

from cmalab.kernels import _impl, fallback


def _time(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    npts = int(sys.argv[1]) if len(sys.argv) > 1 else 33
    rng = np.random.default_rng(0)
    u = rng.normal(size=(npts,) * 4)
    h = [2.0 / (npts - 1)] * 4
    print(f"grid {npts}^4 = {npts**4} nodes; compiled impl: {_impl.IMPL}")

    t_c, hess_c = _time(_impl.hessian_fields, u, h)
    t_f, hess_f = _time(fallback.hessian_fields, u, h)
    gap = max(float(np.max(np.abs(a - b))) for a, b in zip(hess_c, hess_f))
    print(f"hessian_fields      {_impl.IMPL}: {t_c:.3f}s  numpy: {t_f:.3f}s  "
          f"speedup {t_f / t_c:.2f}x  max gap {gap:.2e}")

    p = [rng.normal(size=u.shape) for _ in range(4)]
    v = rng.normal(size=u.shape)
    t_c, out_c = _time(_impl.apply_linearization, *p, v, h)
    t_f, out_f = _time(fallback.apply_linearization, *p, v, h)
    gap = float(np.max(np.abs(out_c - out_f)))
    print(f"apply_linearization {_impl.IMPL}: {t_c:.3f}s  numpy: {t_f:.3f}s  "
          f"speedup {t_f / t_c:.2f}x  max gap {gap:.2e}")


if __name__ == "__main__":
    main()
