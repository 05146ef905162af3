"""Build script: compiles the optional quadrature-kernel extension.

The package works without the extension (a pure NumPy fallback is selected
at import time), so any failure here downgrades to a warning instead of
aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that tolerates a missing compiler or Cython."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: compiled kernels unavailable ({exc}); "
            "the pure-Python fallback will be used at runtime.",
            file=sys.stderr,
        )


def make_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print(
            "WARNING: Cython not found; building without compiled kernels.",
            file=sys.stderr,
        )
        return []
    ext = Extension(
        "casimir_mto._kernels",
        ["src/casimir_mto/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
