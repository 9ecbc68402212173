"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: latkit.kernels
falls back to the pure-Python implementations at import time if
latkit.kernels._ckernels is missing.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/latkit/kernels/_ckernels.pyx"],
        language_level=3,
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
