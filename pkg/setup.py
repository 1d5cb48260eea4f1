"""Build hook: compile the Cython kernels when Cython and a compiler exist.

Without them the package installs with its pure-Python kernels only.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler
            print(f"warning: compiled kernels skipped ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} not built ({exc})")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension
    ext = Extension("kvhom._kernels._ckernels",
                    ["src/kvhom/_kernels/_ckernels.pyx"])
    return cythonize([ext], compiler_directives={"language_level": 3},
                     quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
