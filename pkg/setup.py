from setuptools import Extension, setup
from Cython.Build import cythonize

# No -ffast-math / -march: the pure-Python fallback must stay numerically
# comparable, and outputs must be reproducible across machines.
ext = Extension(
    "twogroup_sis._speedups",
    sources=["src/twogroup_sis/_speedups.pyx"],
    extra_compile_args=["-O3"],
)

setup(ext_modules=cythonize([ext], language_level=3))
