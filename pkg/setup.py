from setuptools import setup, Extension

import numpy as np

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        Extension(
            "wteleport._kernels._native",
            ["src/wteleport/_kernels/_native.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
        language_level="3",
    )
except ImportError:
    # Cython missing: install the pure-python backend only.
    ext_modules = []

setup(ext_modules=ext_modules)
