"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

import unittest

from coneindex.control import verify
from coneindex.model.schwarzschild_geometry import areal_profile

from . import helper


class TestGeometryChecks(unittest.TestCase):
    def test_kernel_identity(self):
        for n in (4, 5, 8):
            for m in (1., 2.):
                self.assertLessEqual(verify.kernel_identity(helper.space(n, m)), 1e-10, f'n={n} m={m}')

    def test_factor_relation(self):
        for n in (4, 5, 8):
            self.assertLessEqual(verify.factor_relation(helper.space(n, 2.)), 1e-12)

    def test_cone_factor_derivative(self):
        for n in (4, 6, 10):
            space = helper.space(n, 1.)
            self.assertLessEqual(verify.cone_factor_difference(space, 1e-4), 1e-6)
            self.assertLess(verify.cone_factor_order_deficit(space), 0.05)

    def test_umbilicity(self):
        for n in (3, 4, 7):
            nonpositive, tail = verify.umbilicity_profile(helper.space(n, 2.))
            self.assertEqual(nonpositive, 0)
            self.assertLess(tail, 1e-6)

    def test_potential_bound(self):
        for n in (3, 4, 9):
            self.assertEqual(verify.potential_bound_excess(helper.space(n, 2.)), 0.)


class TestLinkChecks(unittest.TestCase):
    def test_clifford_margin(self):
        for n in range(4, 11):
            self.assertLessEqual(verify.clifford_margin_error(n), 1e-12)

    def test_lattice_cutoff(self):
        for n in (4, 7, 10):
            self.assertLessEqual(verify.lattice_cutoff_change(n), 1e-12)


class TestIndexAndDensityChecks(unittest.TestCase):
    def test_index_ordering(self):
        for n in (4, 5, 8):
            space = helper.space(n, 2.)
            self.assertEqual(verify.index_ordering_violations(space, 10. * space.R0), 0)
        space = helper.space()
        self.assertEqual(verify.index_ordering_violations(space, helper.log_radius(space, 1)), 0)

    def test_theta_rungs(self):
        space = helper.space()
        profile = areal_profile(space, r_max=100. * space.R0)
        self.assertLessEqual(verify.theta_rung_spread(space, profile, 1e-10), 1e-9)


class TestRunChecks(unittest.TestCase):
    def test_all_pass(self):
        space = helper.space()
        checks, profile = verify.run_checks(space)
        names = {check.name for check in checks}
        for name in ('factor_relation', 'cone_factor_derivative', 'cone_factor_difference_order',
                     'umbilicity_positive', 'umbilicity_decay', 'potential_bound', 'clifford_margin',
                     'lattice_cutoff', 'index_ordering', 'theta_rungs', 'kernel_identity', 'mu_closed_form'):
            self.assertIn(name, names)
        failed = [(c.name, c.value) for c in checks if not c.passed]
        self.assertEqual(failed, [])
        self.assertGreaterEqual(profile.r_max, verify.PROFILE_RANGE * space.R0)


if __name__ == '__main__':
    unittest.main()
