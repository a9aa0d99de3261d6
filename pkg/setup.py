"""Build script: compiles the enumeration kernels when Cython is available.

The package works without the extension (a pure-Python twin of every kernel
is selected at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Degrade to the pure-Python kernels if the C build fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled kernels skipped ({exc}); "
                  "falling back to pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to pure-Python kernels")


def extensions():
    import os
    pyx = "src/ringedcore/_kernels/_ckernels.pyx"
    if not os.path.exists(pyx):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    exts = [Extension("ringedcore._kernels._ckernels", [pyx])]
    return cythonize(exts, language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
