"""Build script: compiles the optional Cython IPF kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the build is marked optional and any compilation failure
degrades gracefully to the pure-Python kernel.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "tabcop._ipf_cy",
                ["src/tabcop/_ipf_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
