"""Build script.

The compiled kernel extension is optional: if Cython (or a pre-generated C
file) is unavailable, or QTOA_NO_EXT is set, the package installs pure-Python
and `qtoa.kernels` falls back to the numpy implementations at import time.
"""
import os

from setuptools import Extension, setup


def kernel_extensions():
    if os.environ.get("QTOA_NO_EXT"):
        return []
    pyx = os.path.join("src", "qtoa", "_kernels.pyx")
    c = os.path.join("src", "qtoa", "_kernels.c")
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is None and not os.path.exists(c):
        return []
    source = pyx if cythonize is not None else c
    ext = Extension(
        "qtoa._kernels",
        sources=[source],
        extra_compile_args=["-O3"],
    )
    if cythonize is not None:
        return cythonize([ext], language_level=3)
    return [ext]


setup(ext_modules=kernel_extensions())
