"""Build hook for the optional Cython kernels.

The extension is optional: if Cython or a C compiler is unavailable the
package installs without it and ``hardyops.backend`` falls back to numpy.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("HARDYOPS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "hardyops._accel",
                    ["src/hardyops/_accel.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
