"""Build script: compiles the optional fast kernels.

The package works without the extension (pure numpy fallbacks are selected
at import time); the extension only accelerates the GL(v,2) stabilizer
sweep and the line-set orbit enumeration.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qdeza._fastcore",
                sources=["src/qdeza/_fastcore.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
