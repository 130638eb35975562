from setuptools import Extension, setup

import numpy as np
from Cython.Build import cythonize

# -ffp-contract=off: the compiled kernels must be bit-identical to the
# numpy fallback, so FMA contraction is disabled.
ext = Extension(
    "torusflow._kernels",
    ["src/torusflow/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize(ext, language_level=3))
