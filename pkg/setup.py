"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so compilation failures are tolerated.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("OWCLUSTER_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "owcluster._kernels._core",
                    ["src/owcluster/_kernels/_core.pyx"],
                    include_dirs=[np.get_include()],
                    # -ffp-contract=off keeps IEEE semantics so the compiled
                    # kernels agree bit-for-bit with the Python fallback.
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
