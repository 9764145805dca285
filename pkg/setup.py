"""Builds the optional compiled annealing kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile only costs speed.
"""

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "bittp._kernels._sa_core",
        sources=["src/bittp/_kernels/_sa_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
