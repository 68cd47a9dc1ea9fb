from setuptools import Extension, setup

# The compiled kernels are optional: without Cython (or a C compiler) the
# package falls back to the pure numpy implementation at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("mipseries._speedups", ["src/mipseries/_speedups.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
