"""Build script for the compiled backend.

The extension is optional at runtime: if it fails to build or import, the
package falls back to the pure-NumPy backend.  Set RICCATI_LAB_NO_EXT=1 to
skip compilation entirely.
"""

import os

from setuptools import Extension, setup

if os.environ.get("RICCATI_LAB_NO_EXT") == "1":
    ext_modules = []
else:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "riccati_lab._backend._core",
                ["src/riccati_lab/_backend/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
