import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "nntlab._attach_c",
                ["src/nntlab/_attach_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback in nntlab._attach_py is used when the compiled
    # kernels are unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
