"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

import math
import unittest

import numpy as np

from coneindex.model.errors import NumericError
from coneindex.model.numerics import rk4_integrate, integrate_adaptive_simpson, ldl_inertia


class TestRungeKutta(unittest.TestCase):
    def test_exponential(self):
        nodes = np.linspace(0., 1., 101)
        ys = rk4_integrate(lambda t, y: y, nodes, np.array([1.]))
        self.assertEqual(ys.shape, (101, 1))
        self.assertAlmostEqual(ys[-1, 0], math.e, delta=1e-8)

    def test_oscillator_on_nonuniform_nodes(self):
        nodes = np.sort(np.concatenate([np.linspace(0., math.pi, 200), [0.123, 1.7]]))
        ys = rk4_integrate(lambda t, y: np.array([y[1], -y[0]]), nodes, np.array([0., 1.]))
        self.assertAlmostEqual(ys[-1, 0], 0., delta=1e-7)
        self.assertAlmostEqual(ys[-1, 1], -1., delta=1e-7)


class TestAdaptiveSimpson(unittest.TestCase):
    def test_sine(self):
        value, error = integrate_adaptive_simpson(math.sin, 0., math.pi, tol=1e-12)
        self.assertAlmostEqual(value, 2., delta=1e-10)
        self.assertLess(error, 1e-9)

    def test_reversed_and_empty(self):
        value, _ = integrate_adaptive_simpson(math.exp, 1., 0., tol=1e-12)
        self.assertAlmostEqual(value, 1. - math.e, delta=1e-10)
        self.assertEqual(integrate_adaptive_simpson(math.exp, 2., 2.), (0., 0.))

    def test_evaluation_cap(self):
        with self.assertRaises(NumericError) as cm:
            integrate_adaptive_simpson(lambda x: math.sin(50. * x), 0., 10., tol=1e-14, max_evaluations=20)
        self.assertEqual(cm.exception.operation, 'integrate_adaptive_simpson')


class TestInertia(unittest.TestCase):
    def test_diagonal(self):
        negative, pivots = ldl_inertia([-1., 2., -3.], [0., 0.])
        self.assertEqual(negative, 2)
        self.assertEqual(len(pivots), 3)

    def test_positive_definite_laplacian(self):
        size = 50
        negative, _ = ldl_inertia(np.full(size, 2.), np.full(size - 1, -1.))
        self.assertEqual(negative, 0)

    def test_matches_eigenvalues(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            size = int(rng.integers(2, 40))
            diag = rng.standard_normal(size)
            off = rng.standard_normal(size - 1)
            full = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
            expected = int(np.count_nonzero(np.linalg.eigvalsh(full) < 0.))
            negative, _ = ldl_inertia(diag, off, pivot_tolerance=0.)
            self.assertEqual(negative, expected)

    def test_pivot_breakdown(self):
        with self.assertRaises(NumericError) as cm:
            ldl_inertia([1., 1.], [1.])
        self.assertEqual(cm.exception.pivot_index, 1)


if __name__ == '__main__':
    unittest.main()
