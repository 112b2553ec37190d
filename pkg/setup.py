"""Build script for the optional compiled field kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed cythonization degrades to a pure build instead of
breaking the install.
"""

from setuptools import Extension, setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "beaconplan._fieldcore",
        ["src/beaconplan/_fieldcore.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
