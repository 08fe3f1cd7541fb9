"""Build script for the optional compiled kernels.

The package works without them; ``ewlgame.kernels`` falls back to the numpy
implementation when ``ewlgame._kernels`` cannot be imported.
"""
import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    cythonize = None


class OptionalBuildExt(build_ext):
    """Do not fail the install when no compiler is available."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: failed to build {ext.name} ({exc}); using numpy fallback")


extensions = []
if cythonize is not None and not os.environ.get("EWLGAME_NO_EXT"):
    extensions = cythonize(
        [
            Extension(
                "ewlgame._kernels",
                ["src/ewlgame/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
