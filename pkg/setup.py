"""Build the optional Cython kernels.

The package works without them (``woodwalk._pykernels`` is used instead), so a
missing compiler or Cython install only downgrades speed.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("WOODWALK_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "woodwalk._ckernels",
                    ["src/woodwalk/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
