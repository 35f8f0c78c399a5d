"""Time the compiled kernels against the numpy fallback.

Run as ``python benchmarks/bench_kernels.py``. Arguments are realistic for
the standard sweeps: the arrival map over a truncated-normal spread of
displacements, the single-packet flux on a dense time grid, and the
two-packet current at a fringe-resolving detector.
"""
import math
import time

import numpy as np

from qtoa import kernels
from qtoa import _kernels_py

try:
    from qtoa import _kernels
except ImportError:
    _kernels = None

SIZES = (4097, 65537, 1048576)


def best_of(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n):
    rng = np.random.default_rng(0)
    xi = np.sort(rng.uniform(-8.0, 1.0 / 0.37, n))
    t = np.linspace(0.0, 3.0, n)
    t_fringe = np.linspace(1e-4, 0.4, n)
    nsq = 1.0 / (2.0 * (1.0 + math.exp(-0.5 * 20.0**2 * 3.0**2)))
    return (
        ("toa_exact_batch", "toa_exact_batch", (xi, 1.0, 1.3, 0.37)),
        ("gaussian_flux_grid", "gaussian_flux_grid", (t, 1.0, 2.0, 0.3, 0.36)),
        (
            "superposition_current_grid",
            "superposition_current_grid",
            (t_fringe, 1.195, 1.0, 200.0, 1.0, 3.0, 10.0, -10.0, nsq),
        ),
    )


def main():
    print(f"active backend: {kernels.BACKEND}")
    if _kernels is None:
        print("compiled extension not importable; timing the numpy fallback only")
    header = f"{'kernel':<28} {'n':>9} {'numpy ms':>10} {'compiled ms':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in SIZES:
        for label, name, args in cases(n):
            py_fn = getattr(_kernels_py, name)
            py_ms = 1e3 * best_of(lambda: py_fn(*args))
            if _kernels is None:
                print(f"{label:<28} {n:>9} {py_ms:>10.2f} {'-':>12} {'-':>8}")
                continue
            c_fn = getattr(_kernels, name)
            c_ms = 1e3 * best_of(lambda: c_fn(*args))
            out_py = np.asarray(py_fn(*args))
            out_c = np.asarray(c_fn(*args))
            scale = np.max(np.abs(out_py)) or 1.0
            mismatch = np.max(np.abs(out_py - out_c)) / scale
            if mismatch > 5e-15:
                raise SystemExit(f"{label}: backends disagree by {mismatch:.2e}")
            print(f"{label:<28} {n:>9} {py_ms:>10.2f} {c_ms:>12.2f} {py_ms / c_ms:>8.2f}")


if __name__ == "__main__":
    main()
