from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lampwalk._core",
                ["src/lampwalk/_core.pyx"],
                language="c++",
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback (lampwalk._core_py) is used at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
