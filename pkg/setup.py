"""Build script for the optional compiled integrator.

The package works without the extension; ``nlpi._backend`` falls back to
the pure-Python kernel when ``nlpi._kernel`` cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("NLPI_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "nlpi._kernel",
                    ["src/nlpi/_kernel.pyx"],
                    # keep a*b+c unfused so both kernels round identically
                    extra_compile_args=["-ffp-contract=off"],
                )
            ],
            compiler_directives=dict(
                language_level="3",
                boundscheck=False,
                wraparound=False,
                cdivision=True,
            ),
        )

setup(ext_modules=ext_modules)
