"""Build script for the optional Cython scan kernel.

The package works without it; ``geolocdns._scan`` falls back to the pure
Python implementation when the extension is missing.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "geolocdns._kernels",
                ["src/geolocdns/_kernels.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off", "-fno-builtin"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
