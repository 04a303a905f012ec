"""Build script: compiles the optional batched-transport kernel.

The package works without the extension (conerec._backend falls back to
the numpy implementation), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "conerec._kernels",
                ["src/conerec/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"conerec: skipping compiled kernels ({exc})")

setup(ext_modules=ext_modules)
