"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set QTOA_NO_EXT=1 to force the numpy fallback (it also skips building the
extension). ``BACKEND`` records which implementation is live so diagnostics
and benchmarks can report it.
"""
import os

if os.environ.get("QTOA_NO_EXT"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

toa_exact_batch = _impl.toa_exact_batch
gaussian_flux_grid = _impl.gaussian_flux_grid
superposition_current_grid = _impl.superposition_current_grid
