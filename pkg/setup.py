"""Build script for the optional compiled kernel core.

The package is pure Python plus one accelerator extension
(execaware._kernels._core). If Cython or a C compiler is missing the
build silently falls back to the pure-Python kernels; nothing else
depends on the extension being present.

Build in place with:  python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

PYX = os.path.join("src", "execaware", "_kernels", "_core.pyx")
C = os.path.join("src", "execaware", "_kernels", "_core.c")


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        if os.path.exists(C):
            return [
                Extension(
                    "execaware._kernels._core",
                    [C],
                    extra_compile_args=["-O3"],
                )
            ]
        return []
    return cythonize(
        [
            Extension(
                "execaware._kernels._core",
                [PYX],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


class optional_build_ext(build_ext):
    """Never fail the install because the accelerator cannot compile."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure is non-fatal
            print(f"warning: skipping compiled kernels ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: could not build {ext.name} ({exc}); using pure-Python fallback")


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
