#!/usr/bin/env python

"""The setup script."""
from typing import List

from setuptools import find_packages, setup

with open("README.rst") as readme_file:
    readme = readme_file.read()

with open("HISTORY.rst") as history_file:
    history = history_file.read()

requirements: List = [
    "multipledispatch>=0.6.0",
    "networkx>=2.6",
    "numpy>=1.21",
]

setup_requirements = [
    "pytest-runner",
]

test_requirements = [
    "pytest>=3",
]

setup(
    author="George EC Burton",
    author_email="g.e.c.burton@gmail.com",
    python_requires=">=3.10",
    classifiers=[
        "Development Status :: 2 - Pre-Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description="exact and exhaustive checks around the 1/4 density threshold "
    "for bi-cliques in string graphs",
    entry_points={
        "console_scripts": ["string-threshold=string_threshold.cli:console"],
    },
    install_requires=requirements,
    license="MIT license",
    long_description=readme + "\n\n" + history,
    include_package_data=True,
    package_data={"string_threshold": ["golden.json"]},
    keywords="string_threshold",
    name="string_threshold",
    packages=find_packages(include=["string_threshold", "string_threshold.*"]),
    setup_requires=setup_requirements,
    test_suite="tests",
    tests_require=test_requirements,
    url="https://github.com/gecBurton/string_threshold",
    version="0.1.0",
    zip_safe=False,
)
