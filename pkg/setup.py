import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an optional fast path: the package falls back to
# the numpy implementations when the extension is absent.
extensions = []
if cythonize is not None and not os.environ.get("FRAMESIEVE_SKIP_EXT"):
    extensions = cythonize(
        [
            Extension(
                "framesieve.kernels._ckernels",
                ["src/framesieve/kernels/_ckernels.pyx"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=extensions)
