import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "polyurn._core",
        ["src/polyurn/_core.pyx"],
        include_dirs=[numpy.get_include(), "src/polyurn"],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
