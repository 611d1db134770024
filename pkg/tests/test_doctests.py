#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Runs the usage examples embedded in the module docstrings."""

import doctest
import importlib
import sys
import unittest

import testsupport  # noqa: F401
from marsupial import catenary, cli, config, errors, geometry

# the package re-exports the functions pva2d/pva3d under the submodule names
pva2d = importlib.import_module("marsupial.pva2d")
pva3d = importlib.import_module("marsupial.pva3d")



#----- test cases

class DoctestTestCase(unittest.TestCase):
    def _check(self, module):
        failed, attempted = doctest.testmod(module, verbose=False, report=False)
        self.assertGreater(attempted, 0, module.__name__)
        self.assertEqual(failed, 0, module.__name__)

    def test_errors(self):
        self._check(errors)

    def test_geometry(self):
        self._check(geometry)

    def test_catenary(self):
        self._check(catenary)

    def test_pva2d(self):
        self._check(pva2d)

    def test_pva3d(self):
        self._check(pva3d)

    def test_config(self):
        self._check(config)

    def test_cli(self):
        self._check(cli)



#---- mainline

def suite():
    """Return a unittest.TestSuite to be used by test.py."""
    return unittest.TestLoader().loadTestsFromTestCase(DoctestTestCase)

if __name__ == "__main__":
    runner = unittest.TextTestRunner(sys.stdout, verbosity=2)
    result = runner.run(suite())
