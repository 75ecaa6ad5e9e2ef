"""Build script: compiles the optional Cython reduction core.

The package is fully functional without the extension (a vectorized numpy
fallback is selected at import time), so a failed compile is not fatal.
"""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "lithoqed._core",
                ["src/lithoqed/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-march=native",
                                    "-fcx-limited-range"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"lithoqed: skipping compiled core ({exc})")
    extensions = []

setup(ext_modules=extensions)
