import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: if the build fails (or Cython is
# missing) the package falls back to the pure-Python implementations
# selected in filtsurf.kernels at import time.
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "filtsurf.kernels._core",
                ["src/filtsurf/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    extensions = []

setup(ext_modules=extensions)
