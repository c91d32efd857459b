"""Build script: compiles the sampling hot loops as a C extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so any failure here is non-fatal.
"""
import sys

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    try:
        return cythonize(
            [
                Extension(
                    "orthantwalks._speedups",
                    ["src/orthantwalks/_speedups.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # compiler missing, etc.
        print("orthantwalks: skipping compiled kernels (%s)" % exc, file=sys.stderr)
        return []


setup(ext_modules=_extensions())
