"""Build hook for the optional compiled kernel extension.

The package is fully functional without compilation: modeshift._kernels
falls back to the pure-Python implementation when the extension is absent.
Building with Cython installed produces modeshift._kernels._cykern.

-ffp-contract=off keeps the compiled kernels bit-identical to the pure
backend (no fused multiply-add contraction).
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/modeshift/_kernels/_cykern.pyx"],
        language_level=3,
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O2", "-ffp-contract=off"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
