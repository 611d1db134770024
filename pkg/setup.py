#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.

"""marsupial: path planning for a UGV carrying a tethered UAV"""

import os
import re
from setuptools import setup


def read_file(filename):
    """
    Reads the contents of a given file relative to the directory
    containing this file and returns it.

    :param filename:
        The file to open and read contents from.
    """
    with open(os.path.join(os.path.dirname(__file__), filename), encoding="utf-8") as f:
        return f.read()


def read_version():
    """
    Reads ``__version_info__`` from the package without importing it, so the
    numeric dependencies need not be installed to run this script.
    """
    match = re.search(r"^__version_info__ = \(([\d, ]+)\)", read_file(os.path.join("marsupial", "__init__.py")), re.M)
    return ".".join(part.strip() for part in match.group(1).split(","))


install_requires = [
    'pyyaml',
    'numpy >=1.22',
    'scipy >=1.8',
    'networkx >=2.6',
    'svgwrite',
]

setup(
    name="marsupial",
    version=read_version(),
    description="Ground and aerial path planning for a tethered UGV-UAV pair",
    long_description=read_file('README'),
    author="The marsupial authors",
    license="MIT License",
    platforms=["any"],
    classifiers="""Development Status :: 4 - Beta
Intended Audience :: Science/Research
License :: OSI Approved :: MIT License
Programming Language :: Python :: 3
Operating System :: OS Independent
Topic :: Scientific/Engineering""".split("\n"),
    keywords=' '.join(["robotics",
                       "path-planning",
                       "tether",
                       "catenary",
                       "uav",
                       "ugv",
                       ]),
    packages=["marsupial"],
    package_data={"marsupial": ["defaults.yaml"]},
    include_package_data=True,
    entry_points={
        'console_scripts': [
            'marsupial = marsupial:main',
            ]
        },
    zip_safe=False,
    python_requires=">=3.9",
    install_requires=install_requires,
    extras_require={"test": ["pytest"]},
    )
