"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

End to end runs over the tabulated cones. Slower than the module tests.
"""

import io
import math
import unittest
from unittest import mock

from coneindex import cidx
from coneindex.model import index_forms as forms
from coneindex.model.density import density_report
from coneindex.model.index_forms import DivergenceVerdict, WITNESS_THRESHOLD
from coneindex.model.sphere_link_catalog import equator, clifford, stability_margin

from . import helper

STABLE_RADII = (10., 100., 1000.)
WITNESS_TURNS = 4
WITNESS_LEVELS = 5
GRID = 2000
COARSE_GRID = 1000


def _counts(report):
    return report.ind_D, report.null_D, report.ind_F, report.null_F


class IndexCase(unittest.TestCase):
    def assert_decomposition(self, report):
        self.assertLessEqual(report.ind_D, report.ind_F)
        self.assertLessEqual(report.ind_F, report.ind_M)
        if not report.degenerate_modes:
            self.assertEqual(report.ind_M, report.ind_D + report.null_D + report.ind_R)

    def grid_stable_report(self, space, link, R, k_max):
        """
        Report at the production grid whose counts match the half grid.
        """
        report = forms.index_report(space, link, R, k_max=k_max, grid_size=GRID, ladder=(), refine=False)
        coarse = forms.index_report(space, link, R, k_max=k_max, grid_size=COARSE_GRID, ladder=(), refine=False)
        self.assertEqual(_counts(report), _counts(coarse), f'{link.label} n={space.n} R/R0={R / space.R0:g}')
        self.assert_decomposition(report)
        return report


class TestStableCones(IndexCase):
    def _assert_stable(self, space, link):
        for multiple in STABLE_RADII:
            report = self.grid_stable_report(space, link, multiple * space.R0, k_max=12)
            self.assertEqual(report.ind_F, 0, f'{link.label} n={space.n} R/R0={multiple}')
            self.assertEqual(report.divergence_verdict, DivergenceVerdict.STABLE)

    def test_equators(self):
        for n in range(4, 8):
            self._assert_stable(helper.space(n), equator(n))

    def test_clifford_high_dimension(self):
        for n in range(8, 11):
            for p in (1, (n - 2) // 2):
                self._assert_stable(helper.space(n), clifford(n, p))

    def test_margin_concordance(self):
        for n in range(4, 13):
            space = helper.space(n)
            for link in (equator(n), clifford(n, 1)):
                if stability_margin(link) < 0.:
                    continue
                report = forms.index_report(space, link, 100. * space.R0, k_max=3, grid_size=helper.TEST_GRID,
                                            ladder=())
                self.assertEqual(report.ind_F, 0, f'{link.label} n={n}')
                self.assert_decomposition(report)


class TestUnstableCones(IndexCase):
    def test_witnesses_and_dirichlet_index(self):
        for n in range(4, 8):
            space = helper.space(n)
            link = clifford(n, 1)
            R = helper.log_radius(space, WITNESS_TURNS)
            witnesses = [forms.witness_value(space, link, j, R) for j in range(1, WITNESS_LEVELS + 1)]
            for j, value in enumerate(witnesses, 1):
                self.assertLess(value, WITNESS_THRESHOLD, f'n={n} j={j}')
            report = self.grid_stable_report(space, link, R, k_max=6)
            negative = sum(1 for v in witnesses if v < WITNESS_THRESHOLD)
            self.assertGreaterEqual(report.ind_D, WITNESS_LEVELS)
            self.assertGreaterEqual(report.ind_D, negative)

    def test_divergent_trend(self):
        for n in range(4, 8):
            space = helper.space(n)
            radii = [helper.log_radius(space, t) for t in (1, 2, 4)]
            reports = forms.index_sweep(space, clifford(n, 1), radii, k_max=2, grid_size=GRID, refine=False)
            counts = [r.ind_D for r in reports]
            self.assertLess(counts[0], counts[1], f'n={n}')
            self.assertLess(counts[1], counts[2], f'n={n}')
            self.assertEqual(reports[-1].divergence_verdict, DivergenceVerdict.DIVERGENT_TREND)
            for report in reports:
                self.assert_decomposition(report)


class TestQuadraticForms(unittest.TestCase):
    def test_conformal_relation_random_profiles(self):
        for seed in range(20):
            n = (4, 5, 6)[seed % 3]
            space = helper.space(n)
            R = 10. * space.R0
            psi = helper.random_profile(space, R, seed=seed)
            self.assertLessEqual(forms.conformal_residual(space, equator(n), psi, R), 1e-6, f'n={n} seed={seed}')


class TestDensity(unittest.TestCase):
    def test_clifford_over_equator(self):
        space = helper.space(4)
        report = density_report(space, clifford(4, 1), equator(4))
        self.assertAlmostEqual(report.theta_closed, math.pi / 2., delta=1e-12)
        self.assertAlmostEqual(report.theta_numeric, math.pi / 2., delta=1e-9)
        self.assertLessEqual(report.monotonicity_residual, 1e-8)
        self.assertLessEqual(report.mu_closed_form_error, 1e-9)


class TestVerify(unittest.TestCase):
    def test_identities_hold(self):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as out:
            status = cidx.main(['verify', '--n', '4'])
        self.assertEqual(status, 0, out.getvalue())


if __name__ == '__main__':
    unittest.main()
