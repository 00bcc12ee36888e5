"""Build script.

The integration kernel exists twice: a Cython extension (fast path) and a
pure-Python twin selected at import time when the extension is missing.
Building the extension is therefore optional: if no compiler or Cython is
available the install proceeds and the package falls back to the Python
kernel.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "wiretail._kernel",
        ["src/wiretail/_kernel.pyx"],
        # Keep the compiled arithmetic bit-identical to the Python twin:
        # no FMA contraction, and no sin/cos -> sincos fusion (libm sincos
        # can round differently from separate sin and cos calls, which the
        # Python twin makes).
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos", "-fno-builtin-sincos"],
    )
    ext_modules = cythonize([ext], language_level=3)
except Exception as exc:  # pragma: no cover - exercised only without Cython
    sys.stderr.write(f"wiretail: building without compiled kernel ({exc})\n")

setup(ext_modules=ext_modules)
