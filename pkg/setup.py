"""Build hook for the optional compiled kernel extension.

The package is fully functional without the extension (a pure-Python
backend is selected at import time); building it just makes the hot
loops faster.  Set FLOWAR_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise fall back silently."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, no Cython, ...
            print(f"flowar: skipping compiled kernels ({exc}); "
                  "the pure-Python backend will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"flowar: failed to build {ext.name} ({exc}); "
                  "the pure-Python backend will be used")


ext_modules = []
cmdclass = {}
if not os.environ.get("FLOWAR_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("flowar._kernels", ["src/flowar/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )
        cmdclass = {"build_ext": optional_build_ext}
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass=cmdclass)
