"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so the build degrades gracefully when Cython or a
C compiler is unavailable.  Build in place with:

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("SELKIT_SKIP_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "selkit._kernels",
        ["src/selkit/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(ext, language_level="3")


setup(ext_modules=_extensions())
