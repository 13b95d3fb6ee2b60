"""Build script for the optional compiled metric kernels.

The package works without the extension: codemix.metrics.kernels falls back
to the pure-Python implementations when the compiled module is missing.
"""

import logging

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

log = logging.getLogger(__name__)


class OptionalBuildExt(build_ext):
    """Never fail the install over the accelerator extension."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            log.warning("skipping compiled kernels: %s", exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            log.warning("skipping %s: %s", ext.name, exc)


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("codemix.metrics._ckernels", ["src/codemix/metrics/_ckernels.pyx"])],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
