from setuptools import setup, find_packages
from pathlib import Path

_version_ns = {}
exec(Path("cokernel_toolkit/core/__version__.py").read_text(), _version_ns)
__version__ = _version_ns["__version__"]

with Path("requirements.txt").open() as f:
    install_requires = f.read().splitlines()

with Path("requirements-dev.txt").open() as f:
    dev_requires = f.read().splitlines()

setup(
    name="cokernel-toolkit",
    version=__version__,
    author="Gustavo Inostroza",
    author_email="gusinostrozar@gmail.com",
    description="Exact laws and simulation of cokernels of random p-adic matrices",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    url="https://github.com/Inostroza7/cokernel-toolkit",
    packages=find_packages(exclude=["tests*"]),
    install_requires=install_requires,
    extras_require={"dev": dev_requires},
    entry_points={
        "console_scripts": [
            "cokernel-toolkit=cokernel_toolkit.cli:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires='>=3.8',
)
