import os

from setuptools import setup
from setuptools.extension import Extension

# The compiled kernel core is optional: the package falls back to the NumPy
# implementations in lstcn._kernels when lstcn._core is absent.  Set
# LSTCN_NO_EXT=1 to skip the extension build entirely.
ext_modules = []
if not os.environ.get("LSTCN_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "lstcn._core",
                    sources=["src/lstcn/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
