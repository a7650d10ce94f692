import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an optimisation, not a requirement: the package
# falls back to the numpy implementations in dicutcut._pykernels at import
# time when the extension is missing.
extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "dicutcut._kernels",
                ["src/dicutcut/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
