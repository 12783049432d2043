"""Build script for the optional compiled jet kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure to compile is demoted to a warning
rather than aborting the install.
"""

import warnings

from setuptools import setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError as exc:  # pragma: no cover - build-environment dependent
        warnings.warn(f"compiled jet kernel skipped ({exc}); using numpy fallback")
        return []
    return cythonize(
        [
            Extension(
                "groliton._jetkernel",
                ["src/groliton/_jetkernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


try:
    setup(ext_modules=_extensions())
except SystemExit:  # pragma: no cover - compiler missing at install time
    warnings.warn("compiled jet kernel failed to build; using numpy fallback")
    setup(ext_modules=[])
