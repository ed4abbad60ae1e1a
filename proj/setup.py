import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name, sourcedir=""):
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        # DESTINATION is "tspeval", so install into the directory that
        # holds the package, not the package itself.
        prefix = Path(self.get_ext_fullpath(ext.name)).resolve().parent.parent
        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={os.environ.get('TSPEVAL_BUILD_TYPE', 'Release')}",
            f"-DPython_EXECUTABLE={sys.executable}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DSKBUILD=ON",
            "-DTSPEVAL_BUILD_TESTS=OFF",
            "-DTSPEVAL_BUILD_CLI=OFF",
        ]
        subprocess.run(
            ["cmake", "-S", ext.sourcedir, "-B", str(build_temp)] + cmake_args, check=True
        )
        subprocess.run(
            ["cmake", "--build", str(build_temp), "--target", "tspeval_pyext", "-j"],
            check=True,
        )
        subprocess.run(
            ["cmake", "--install", str(build_temp), "--prefix", str(prefix)], check=True
        )


setup(
    ext_modules=[CMakeExtension("tspeval._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
