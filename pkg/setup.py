"""Build the optional compiled kernels.

The extension is marked optional: if Cython or a C compiler is missing the
package still installs and falls back to the numpy kernels.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "gwfql.opensys._kernels",
                ["src/gwfql/opensys/_kernels.pyx"],
                extra_compile_args=["-O3", "-fcx-limited-range"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
