"""Build script: compiles the optional Cython term-arithmetic kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time); set BILAX_NO_EXT=1 to skip the build.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("BILAX_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "bilax._poly_cy",
                    ["src/bilax/_poly_cy.pyx"],
                    extra_compile_args=["-O3"],
                    language="c",
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
