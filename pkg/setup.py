"""Build the optional compiled kernels.

The extension is marked optional: when no C compiler (or Cython) is
available the package installs anyway and falls back to the numpy
implementation in ``cirmax._kernels_py``.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    cythonize = None


def _extensions():
    if cythonize is None:
        return []
    ext = Extension(
        "cirmax._kernels",
        ["src/cirmax/_kernels.pyx"],
        include_dirs=["src/cirmax"],
        extra_compile_args=["-O3", "-fno-fast-math"],
        optional=True,
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "embedsignature": True,
        },
    )


setup(ext_modules=_extensions())
