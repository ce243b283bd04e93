"""Build the optional compiled kernels.

The package works without them: ``slcweno._kernels`` falls back to the
numpy implementation when the extension is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SLCWENO_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "slcweno._kernels._ckernels",
                    ["src/slcweno/_kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    # no FMA contraction: keep bit-compatibility with the numpy path
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
