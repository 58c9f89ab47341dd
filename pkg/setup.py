from setuptools import Extension, setup
from Cython.Build import cythonize

# No -march flags: keeping the compiler on the portable baseline avoids FMA
# contraction, so the compiled EDT stays bit-identical to the pure-Python path.
extensions = [
    Extension(
        "cbctseg.kernels._compiled",
        ["src/cbctseg/kernels/_compiled.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
