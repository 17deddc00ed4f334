"""Build script: compiles the optional fast kernels when Cython and a C
compiler are available.  The package works without them (pure-Python
fallback in pipetrack._kernels.reference)."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PIPETRACK_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "pipetrack._kernels.compiled",
                    ["src/pipetrack/_kernels/compiled.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
