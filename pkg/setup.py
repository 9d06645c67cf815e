import os

from setuptools import setup

ext_modules = []
if not os.environ.get("STRATKIT_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("stratkit._kernels", ["src/stratkit/_kernels.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
