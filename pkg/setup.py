import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("PERIPH_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "periph._ckernels",
                    ["src/periph/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # no compiler / Cython: pure-Python fallback
        print(f"periph: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
