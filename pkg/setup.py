import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "okdrop._kernels._cykernels",
                ["src/okdrop/_kernels/_cykernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
    # the package falls back to the numpy kernels when the compiler is missing
    for ext in ext_modules:
        ext.optional = True

setup(ext_modules=ext_modules)
