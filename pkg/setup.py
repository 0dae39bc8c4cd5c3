#!/usr/bin/env python

import os

from setuptools import find_packages, setup

install_requires = [
    line.rstrip() for line in open(
        os.path.join(os.path.dirname(__file__), "requirements.txt")
    )
]

scripts = [
            'ibsl_states/cli/ibsl_checks.py',
]

setup(name='ibslStates',
      install_requires=install_requires,
      version='0.1.0',
      description='Exact states on finite involutive bisemilattices',
      license='MIT',
      packages=find_packages(exclude=['tests', 'tests.*']),
      scripts=scripts,
      zip_safe=False)
