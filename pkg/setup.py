import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension(
            "cmalab.kernels._stencil",
            ["src/cmalab/kernels/_stencil.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )],
        language_level=3,
    )
except ImportError:
    # no cython: the package still works through the numpy fallback
    ext_modules = []

setup(ext_modules=ext_modules)
