import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: pairent.kernels falls back to the
# pure-NumPy implementation when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pairent._kernels",
                ["src/pairent/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
