"""Build script: compiles the optional Cython Monte Carlo core.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed.  ``python setup.py``
is driven through pyproject.toml; install with

    pip install -e . --no-build-isolation
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    import os

    if not os.path.exists("src/solvheat/_mc_core.pyx"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:  # pragma: no cover - build-env dependent
        warnings.warn(f"Cython/NumPy unavailable ({exc}); building pure-Python solvheat")
        return []
    return cythonize(
        [
            Extension(
                "solvheat._mc_core",
                ["src/solvheat/_mc_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )


class OptionalBuildExt(build_ext):
    """Degrade to the pure-Python package when the C toolchain is broken."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - build-env dependent
            warnings.warn(f"solvheat._mc_core build failed ({exc}); using NumPy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - build-env dependent
            warnings.warn(f"solvheat._mc_core build failed ({exc}); using NumPy fallback")


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
