"""Build the optional compiled thermal kernel.

The pure-Python kernel in ``planvent.thermal._kernel_py`` is used whenever the
extension is missing, so a failed compile only costs speed.
"""
import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

PYX = "src/planvent/thermal/_kernel.pyx"


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernel not built ({exc}); using pure Python", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc})", file=sys.stderr)


def _extensions():
    if not os.path.exists(PYX):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "planvent.thermal._kernel",
        [PYX],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    try:
        return cythonize([ext], compiler_directives={"language_level": "3"})
    except Exception as exc:  # noqa: BLE001
        print(f"warning: cythonize failed ({exc}); using pure Python", file=sys.stderr)
        return []


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
