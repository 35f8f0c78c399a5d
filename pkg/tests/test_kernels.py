import os
import subprocess
import sys

import numpy as np
import pytest

from qtoa import BACKEND, RngStream
from qtoa import _kernels_py as ref
from qtoa import kernels
from qtoa.numerics import sample_truncated_normal

compiled_only = pytest.mark.skipif(
    BACKEND != "compiled", reason="compiled extension not active"
)


def _rel(a, b):
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return np.max(np.abs(a - b) / scale)


def test_backend_reported():
    assert BACKEND in ("compiled", "python")
    assert kernels.BACKEND == BACKEND


def test_fallback_selected_by_env():
    out = subprocess.run(
        [sys.executable, "-c", "import qtoa; print(qtoa.BACKEND)"],
        env={**os.environ, "QTOA_NO_EXT": "1"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_exact_toa_boundary_and_center():
    r = 0.37
    out = ref.toa_exact_batch(np.array([1.0 / r, 0.0]), 2.0, 0.8, r)
    assert out[0] == 0.0
    assert out[1] == 2.0


def test_exact_toa_monotone_decreasing():
    for q, r in [(1e-3, 1e-3), (0.5, 0.02), (30.0, 0.1), (2.0, 5.0)]:
        xi = np.linspace(-12.0, 1.0 / r, 4001)
        T = ref.toa_exact_batch(xi, 1.0, q, r)
        assert np.all(np.diff(T) < 0.0)
        assert np.all(np.isfinite(T))


def test_flux_nonnegative_and_decaying():
    t = np.linspace(0.0, 40.0, 5001)
    w = ref.gaussian_flux_grid(t, 1.0, 2.0, 1.0, 2.0)
    assert np.all(w >= 0.0)
    assert w[-1] < 1e-12 * np.max(w)


@compiled_only
class TestCompiledParity:
    def test_exact_toa(self):
        xi = sample_truncated_normal(2.5, RngStream(seed=7), 50000)
        for q, r in [(1e-3, 1e-4), (1.0, 1.0), (830.0, 0.01), (0.1, 100.0)]:
            a = kernels.toa_exact_batch(xi, 1.7, q, r)
            b = ref.toa_exact_batch(xi, 1.7, q, r)
            assert _rel(a, b) < 5e-15

    def test_flux(self):
        t = np.linspace(0.0, 12.0, 65537)
        a = kernels.gaussian_flux_grid(t, 1.0, 2.0, 1.0, 2.0)
        b = ref.gaussian_flux_grid(t, 1.0, 2.0, 1.0, 2.0)
        assert _rel(a, b) < 5e-15

    def test_current(self):
        t = np.linspace(0.0, 0.6, 65537)
        args = (1.195, 1.0, 200.0, 1.0, 3.0, 10.0, -10.0, 0.5)
        a = kernels.superposition_current_grid(t, *args)
        b = ref.superposition_current_grid(t, *args)
        assert np.max(np.abs(a - b)) < 5e-15 * np.max(np.abs(b))
