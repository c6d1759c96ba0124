"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

import json
import math
import unittest

from coneindex.model.errors import DomainError
from coneindex.model import density
from coneindex.model.density import RigidityClass, WillmoreFlag, AllardFlag
from coneindex.model.schwarzschild_geometry import areal_profile
from coneindex.model.sphere_link_catalog import equator, clifford

from . import helper


class TestAreas(unittest.TestCase):
    def test_boundary_area(self):
        space = helper.space()
        self.assertAlmostEqual(density.boundary_area(space, equator(4)), 16. * math.pi, places=12)
        self.assertAlmostEqual(density.boundary_area(space, clifford(4, 1)), 8. * math.pi ** 2, places=12)
        for n, m in ((4, 2.), (5, 1.), (9, 0.3)):
            space = helper.space(n, m)
            link = equator(n)
            self.assertLess(helper.relative(density.boundary_area(space, link),
                                            density.boundary_area_areal(space, link)), 1e-12)

    def test_theta_closed(self):
        space = helper.space()
        self.assertEqual(density.theta_closed(space, equator(4), equator(4)), 1.)
        self.assertAlmostEqual(density.theta_closed(space, clifford(4, 1), equator(4)), math.pi / 2., places=14)


class TestVolumes(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.space = helper.space()
        cls.profile = areal_profile(cls.space, r_max=1000.)

    def test_mu_closed_form(self):
        link = equator(4)
        self.assertEqual(density.mu_volume(self.space, link, self.profile, 0.), 0.)
        for rho in (0.5, 10., 100., 1000.):
            quadrature = density.mu_volume(self.space, link, self.profile, rho)
            closed = density.mu_volume_closed(self.space, link, self.profile, rho)
            self.assertLess(helper.relative(quadrature, closed), 1e-9)

    def test_volume_ratio_is_link_ratio(self):
        rho = 50.
        ratio = density.schwarzschild_volume(self.space, clifford(4, 1), self.profile, rho) / \
            density.schwarzschild_volume(self.space, equator(4), self.profile, rho)
        self.assertAlmostEqual(ratio, math.pi / 2., delta=1e-9)

    def test_theta(self):
        estimate = density.theta(self.space, clifford(4, 1), equator(4), self.profile, (10., 100., 1000.))
        self.assertEqual(len(estimate.rungs), 3)
        self.assertEqual(len(estimate.differences), 2)
        self.assertAlmostEqual(estimate.extrapolated, math.pi / 2., delta=1e-9)
        with self.assertRaises(DomainError):
            density.theta(self.space, equator(4), equator(4), self.profile, (100., 10.))

    def test_bridging_ratio(self):
        gaps = [abs(density.bridging_ratio(self.space, equator(4), self.profile, rho) - 1.)
                for rho in (10., 100., 1000.)]
        self.assertGreater(gaps[0], gaps[1])
        self.assertGreater(gaps[1], gaps[2])
        with self.assertRaises(DomainError):
            density.bridging_ratio(self.space, equator(4), self.profile, 0.)

    def test_monotonicity(self):
        link = equator(4)
        for sigma, rho in ((0., 1.), (1., 10.), (2., 50.), (10., 1000.)):
            self.assertLessEqual(density.monotonicity_residual(self.space, link, self.profile, sigma, rho), 1e-8)
        self.assertEqual(density.monotonicity_residual(self.space, link, self.profile, 5., 5.), 0.)
        with self.assertRaises(DomainError):
            density.monotonicity_residual(self.space, link, self.profile, 10., 5.)

    def test_monotonicity_other_dimension(self):
        space = helper.space(6, 1.)
        profile = areal_profile(space, r_max=60.)
        link = clifford(6, 2)
        for sigma, rho in ((0., 3.), (2., 50.)):
            self.assertLessEqual(density.monotonicity_residual(space, link, profile, sigma, rho), 1e-8)

    def test_perpendicular_term(self):
        self.assertEqual(density.perpendicular_term(self.space, equator(4), self.profile, 1., 10.), 0.)

    def test_out_of_range(self):
        with self.assertRaises(DomainError):
            density.mu_volume(self.space, equator(4), self.profile, 2000.)


class TestRigidity(unittest.TestCase):
    def test_equator(self):
        space = helper.space()
        rigidity = density.rigidity_classify(space, equator(4), 1., equator(4))
        self.assertEqual(rigidity.rigidity_class, RigidityClass.EQUALITY_CONE)
        self.assertEqual(rigidity.willmore_flag, WillmoreFlag.BELOW_THRESHOLD)
        self.assertEqual(rigidity.willmore_label, 'equator')
        self.assertEqual(rigidity.allard_flag, AllardFlag.INDETERMINATE)
        self.assertAlmostEqual(rigidity.allard_excess, 0., places=12)
        self.assertFalse(rigidity.boundary_case)

    def test_clifford_at_threshold(self):
        space = helper.space()
        rigidity = density.rigidity_classify(space, clifford(4, 1), math.pi / 2., equator(4))
        self.assertEqual(rigidity.rigidity_class, RigidityClass.EQUALITY_CONE)
        self.assertEqual(rigidity.willmore_flag, WillmoreFlag.ABOVE_THRESHOLD)
        self.assertTrue(rigidity.boundary_case)
        self.assertEqual(rigidity.willmore_label, 'clifford')
        self.assertGreater(rigidity.allard_excess, 0.)

    def test_strict_and_inconsistent(self):
        space = helper.space()
        with self.assertLogs('coneindex.model.density', level='WARNING'):
            rigidity = density.rigidity_classify(space, equator(4), 1.2, equator(4))
        self.assertEqual(rigidity.rigidity_class, RigidityClass.STRICT_INEQUALITY)
        self.assertEqual(rigidity.willmore_label, 'inconsistent')
        rigidity = density.rigidity_classify(space, equator(4), 2., equator(4))
        self.assertEqual(rigidity.willmore_flag, WillmoreFlag.ABOVE_THRESHOLD)
        self.assertFalse(rigidity.boundary_case)

    def test_other_dimensions(self):
        space = helper.space(5, 1.)
        rigidity = density.rigidity_classify(space, equator(5), 1., equator(5))
        self.assertEqual(rigidity.willmore_flag, WillmoreFlag.NOT_APPLICABLE)
        self.assertEqual(rigidity.rigidity_class, RigidityClass.EQUALITY_CONE)
        with self.assertRaises(DomainError):
            density.rigidity_classify(space, equator(5), float('nan'), equator(5))


class TestDensityReport(unittest.TestCase):
    def test_clifford_over_equator(self):
        space = helper.space()
        report = density.density_report(space, clifford(4, 1), equator(4), rho_ladder=(10., 100., 1000.))
        self.assertAlmostEqual(report.theta_numeric, math.pi / 2., delta=1e-9)
        self.assertAlmostEqual(report.theta_closed, math.pi / 2., places=14)
        self.assertLessEqual(report.monotonicity_residual, 1e-8)
        self.assertLessEqual(report.mu_closed_form_error, 1e-9)
        self.assertEqual(report.rigidity_class, RigidityClass.EQUALITY_CONE)
        self.assertEqual(report.willmore_flag, WillmoreFlag.ABOVE_THRESHOLD)
        self.assertTrue(report.boundary_case)
        self.assertEqual(len(report.csv_row()), len(density.DensityReport.CSV_COLUMNS))
        d = json.loads(json.dumps(report.to_dict()))
        self.assertEqual(d['rigidity_class'], 'EqualityCone')
        self.assertEqual(len(d['theta_rungs']), 3)

    def test_ladder_in_horizon_units(self):
        space = helper.space(5, 1.)
        profile = areal_profile(space, r_max=20. * space.R0)
        report = density.density_report(space, equator(5), equator(5), profile=profile, rho_ladder=(5., 20.))
        self.assertAlmostEqual(report.theta_rungs[-1][0], 20. * space.R0, places=12)
        self.assertEqual(report.theta_numeric, 1.)
        self.assertEqual(report.willmore_flag, WillmoreFlag.NOT_APPLICABLE)

    def test_dimension_mismatch(self):
        with self.assertRaises(DomainError):
            density.density_report(helper.space(), equator(5), equator(4))


if __name__ == '__main__':
    unittest.main()
