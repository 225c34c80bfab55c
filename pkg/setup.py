"""Build script: compiles the integrator core when a toolchain is available.

The compiled extension is optional.  If Cython or a C compiler is missing
(or QOMSPEC_PURE_PYTHON=1 is set), the package installs without it and the
pure-Python kernel is selected at import time.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to a pure-Python install on compiler failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain, ...
            warnings.warn(f"compiled kernel skipped ({exc}); "
                          "falling back to the pure-Python integrator")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped ({exc}); "
                          "falling back to the pure-Python integrator")


ext_modules = []
cmdclass = {}
if os.environ.get("QOMSPEC_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("qomspec._kernel._core",
                       ["src/qomspec/_kernel/_core.pyx"],
                       extra_compile_args=["-O3"])],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        warnings.warn("Cython not available; installing without the compiled kernel")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
