"""Build script: compiles the optional episode-engine extension.

Set FBANDIT_PURE=1 to skip the extension and install the pure-Python
fallback only.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FBANDIT_PURE") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "fbandit._engine._kernel",
                    sources=["src/fbandit/_engine/_kernel.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
