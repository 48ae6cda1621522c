"""Build script: compiles the optional Cython accelerator.

The package is fully functional without the extension (a pure NumPy
backend is selected at import time), so any build failure here is
downgraded to a warning.  Set EPKIT_PURE=1 to skip the compilation
entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(
            f"warning: building the epkit accelerator failed ({exc!r}); "
            "falling back to the pure-Python kernels",
            file=sys.stderr,
        )


ext_modules = []
if not os.environ.get("EPKIT_PURE"):
    try:
        from Cython.Build import cythonize

        extra = [] if sys.platform == "win32" else ["-O3"]
        ext_modules = cythonize(
            [
                Extension(
                    "epkit._core._speedups",
                    ["src/epkit/_core/_speedups.pyx"],
                    extra_compile_args=extra,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
