import os

from setuptools import Extension, setup

# The compiled kernel is optional; the package falls back to numpy without it.
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("FWER_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "fwerbound.montecarlo._kernel",
                ["src/fwerbound/montecarlo/_kernel.pyx"],
                # no fused multiply-add: keeps results bitwise equal to the numpy path
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
