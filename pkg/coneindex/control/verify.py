"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Analytic identities checked by `cidx verify`.

Every check evaluates one identity on exact formulas or on two independent
numerical routes and compares the discrepancy with a tolerance.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..model import schwarzschild_geometry as geometry
from ..model import radial_spectral as radial
from ..model import index_forms as forms
from ..model import density
from ..model.sphere_link_catalog import equator, clifford, jacobi_spectrum, stability_margin, product_levels

logger = logging.getLogger(__name__)

PROFILE_RANGE = 100.
RANDOM_PROFILES = 3


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value)) and self.value <= self.tolerance

    CSV_COLUMNS = ('n', 'm', 'check', 'value', 'tolerance', 'passed')


def kernel_identity(space, points=1000):
    """
    max |v'' + V v| / max |V v| on log spaced points of [R0, 1000 R0].
    """
    r = space.R0 * np.logspace(0., 3., points)
    v = np.asarray(radial.closed_form_v(space, r))
    _, ddv = radial.closed_form_v_derivatives(space, r)
    Vv = np.asarray(geometry.radial_potential(space, r)) * v
    return float(np.max(np.abs(np.asarray(ddv) + Vv)) / np.max(np.abs(Vv)))


def ivp_residual(space, R, j, points=400):
    """
    max |-r^2 g'' - (n-2) r g' - beta g| / max |beta g| for the closed form g_j.
    """
    g, beta, _ = radial.ivp_mode(space, R, j)
    r = space.R0 * np.exp(np.linspace(0., math.log(R / space.R0), points))
    residual = -r * r * g.second_derivative(r) - (space.n - 2) * r * g.derivative(r) - beta * g(r)
    return float(np.max(np.abs(residual)) / np.max(np.abs(beta * g(r))))


def ivp_beta_error(space, R, j):
    _, beta, _ = radial.ivp_mode(space, R, j)
    T = math.log(R / space.R0)
    expected = ((space.n - 3) / 2.) ** 2 + (j * math.pi / T) ** 2
    return abs(beta - expected) / expected


def simons_identity(space, link, R, j, tol):
    """
    Quadrature of Q_delta on f_0 g_j against lambda_0 + beta_j.
    """
    ivp = forms.SeparatedTestFunction.from_ivp(space, R, 0, j)
    quadrature = forms.SeparatedTestFunction(link_level=0, profile=ivp.profile, derivative=ivp.derivative,
                                             R0=ivp.R0, R=ivp.R)
    exact = forms.q_delta(space, link, ivp, R)
    return abs(forms.q_delta(space, link, quadrature, R, tol) - exact) / max(abs(exact), 1.)


def fischer_colbrie_consistency(space, points=200):
    """
    psi = F^-1 r^(-(N-1)/2) v and psi'(R0) = 0.
    """
    r = space.R0 * np.logspace(0., 2., points)
    psi, _ = radial.fc_candidate(space, r)
    F = np.asarray(geometry.cone_factor(space, r))
    v = np.asarray(radial.closed_form_v(space, r))
    other = v * r ** (-(space.N - 1) / 2.) / F
    _, dpsi0 = radial.fc_candidate(space, space.R0)
    return max(float(np.max(np.abs(psi - other) / np.abs(psi))), abs(dpsi0))


def supersolution_excess(space, link, points=500):
    """
    max(L_1 u, 0) / max |V u| for u = r^(-(N-1)/2) v; zero for links with
    nonnegative stability margin.
    """
    lam = jacobi_spectrum(link, 1).eigenvalues[0]
    r = space.R0 * np.logspace(0., 3., points)
    residual = np.asarray(radial.supersolution_residual(space, lam, r))
    u = r ** (-(space.N - 1) / 2.) * np.asarray(radial.closed_form_v(space, r))
    scale = float(np.max(np.abs(np.asarray(geometry.radial_potential(space, r)) * u)))
    return max(float(np.max(residual)), 0.) / scale


def rotation_steklov_error(space, R):
    """
    Rotations tilting an equator give Jacobi fields with Steklov value 1.
    """
    problem = radial.make_mode_problem(space, equator(space.n), 1, R, radial.InnerBC.SCHWARZSCHILD_NEUMANN,
                                       radial.OuterBC.STEKLOV)
    value = radial.steklov_value(problem)
    return float('inf') if value.degenerate else abs(value.value - 1.)


def random_profile(space, R, k, rng, terms=4):
    coefficients = rng.standard_normal(terms) / np.arange(1, terms + 1) ** 2
    return forms.SeparatedTestFunction.sine_series(space, R, k, coefficients)


def conformal_checks(space, link, R, rng, tol):
    residuals = [forms.conformal_residual(space, link, forms.SeparatedTestFunction.from_ivp(space, R, 0, 1), R, tol)]
    for _ in range(RANDOM_PROFILES):
        residuals.append(forms.conformal_residual(space, link, random_profile(space, R, 0, rng), R, tol))
    return max(residuals)


def two_route_schwarzschild(space, link, R, tol):
    psi = forms.SeparatedTestFunction.from_ivp(space, R, 0, 1)
    direct = forms.q_direct(space, link, psi, R, tol)
    lemma = forms.q_schwarzschild(space, link, psi, R, tol)
    return abs(direct - lemma) / max(abs(direct), abs(lemma), 1.)


def factor_relation(space, points=200):
    """
    max |F^(2/(N-2)) - f| / f.
    """
    r = space.R0 * np.logspace(0., 3., points)
    f = np.asarray(geometry.isotropic_factor(space, r))
    F = np.asarray(geometry.cone_factor(space, r))
    return float(np.max(np.abs(F ** (2. / (space.N - 2)) - f) / f))


def cone_factor_difference(space, step, points=200):
    """
    Relative error of the central difference quotient of F with step
    step * r against the closed form F'.
    """
    r = space.R0 * np.logspace(0.05, 0.5, points)
    h = step * r
    quotient = (np.asarray(geometry.cone_factor(space, r + h))
                - np.asarray(geometry.cone_factor(space, r - h))) / (2. * h)
    exact = np.asarray(geometry.cone_factor_derivative(space, r))
    return float(np.max(np.abs(quotient - exact) / np.abs(exact)))


def cone_factor_order_deficit(space, step=2e-3):
    order = math.log2(cone_factor_difference(space, step) / cone_factor_difference(space, step / 2.))
    return max(2. - order, 0.)


def umbilicity_profile(space, points=400):
    """
    :return: (int, float) number of radii with kappa <= 0 above the horizon,
        and kappa(1e8 R0) relative to the largest sampled kappa.
    """
    r = space.R0 * np.logspace(1e-3, 8., points)
    kappa = np.asarray(geometry.umbilicity(space, r))
    return int(np.count_nonzero(kappa <= 0.)), float(kappa[-1] / np.max(kappa))


def potential_bound_excess(space, points=400):
    """
    Relative excess of max V r^n over 2m(n-1).
    """
    r = space.R0 * np.logspace(0., 4., points)
    bound = 2. * space.m * (space.n - 1)
    scaled = np.asarray(geometry.radial_potential(space, r)) * r ** space.n
    return max(float(np.max(scaled)) / bound - 1., 0.)


def clifford_margin_error(n):
    return max(abs(stability_margin(clifford(n, p)) - (n - 2) * (n - 8)) for p in range(1, n - 2))


def lattice_cutoff_change(n, count=8):
    """
    Change of the lowest Clifford levels when the initial lattice box is doubled.
    """
    change = 0.
    for p in sorted({1, (n - 2) // 2}):
        base = product_levels(n, p, n - 2 - p, count)
        wide = product_levels(n, p, n - 2 - p, count, box=2 * max(count, 2))
        if [k for _, k in base] != [k for _, k in wide]:
            return float('inf')
        change = max(change, max(abs(a - b) for (a, _), (b, _) in zip(base, wide)))
    return change


def index_ordering_violations(space, R, k_max=3, grid_size=400):
    """
    Reports breaking ind_D <= ind_F <= ind_M or ind_M = ind_D + null_D + ind_R.
    """
    report = forms.index_report(space, clifford(space.n, 1), R, k_max=k_max, grid_size=grid_size, ladder=(),
                                refine=False)
    violations = int(not report.ind_D <= report.ind_F <= report.ind_M)
    if not report.degenerate_modes:
        violations += int(report.ind_M != report.ind_D + report.null_D + report.ind_R)
    return violations


def theta_rung_spread(space, profile, tol):
    """
    Spread of the density rungs and distance of the extrapolation from the closed form.
    """
    subject = clifford(space.n, 1) if space.n >= 4 else equator(space.n)
    reference = equator(space.n)
    estimate = density.theta(space, subject, reference, profile, [a * space.R0 for a in (10., 30., 100.)], tol)
    closed = density.theta_closed(space, subject, reference)
    return max(max(estimate.differences), abs(estimate.extrapolated - closed)) / closed


def run_checks(space, quad_tol=1e-10, profile_tol=1e-10, seed=0, profile=None):
    """
    :return: (list) Check values for the space, and the areal profile used.
    """
    rng = np.random.default_rng(seed)
    link = equator(space.n)
    R = 10. * space.R0
    checks = [
        Check('horizon_radii', abs(space.s0 - space.R0 * geometry.isotropic_factor(space, space.R0)) / space.s0,
              1e-12),
        Check('horizon_mass', abs(2. * space.R0 ** (space.n - 2) - space.m) / space.m, 1e-12),
        Check('kernel_identity', kernel_identity(space), 1e-10),
        Check('fischer_colbrie_field', fischer_colbrie_consistency(space), 1e-12),
        Check('steklov_rotation', rotation_steklov_error(space, R), 1e-6),
    ]
    if stability_margin(link) >= 0.:
        checks.append(Check('supersolution', supersolution_excess(space, link), 1e-12))
    kappa_nonpositive, kappa_tail = umbilicity_profile(space)
    checks.append(Check('umbilicity_positive', kappa_nonpositive, 0))
    checks.append(Check('umbilicity_decay', kappa_tail, 1e-6))
    checks.append(Check('potential_bound', potential_bound_excess(space), 0.))
    for j in range(1, 6):
        checks.append(Check(f'ivp_residual_j{j}', ivp_residual(space, R, j), 1e-9))
        checks.append(Check(f'ivp_beta_j{j}', ivp_beta_error(space, R, j), 1e-12))
    checks.append(Check('simons_identity', simons_identity(space, link, R, 1, quad_tol), 1e-8))
    if space.n >= 4:
        checks.append(Check('conformal_relation', conformal_checks(space, link, R, rng, quad_tol), 1e-6))
        checks.append(Check('schwarzschild_two_route', two_route_schwarzschild(space, link, R, quad_tol), 1e-6))
        checks.append(Check('factor_relation', factor_relation(space), 1e-12))
        checks.append(Check('cone_factor_derivative', cone_factor_difference(space, 1e-4), 1e-6))
        checks.append(Check('cone_factor_difference_order', cone_factor_order_deficit(space), 0.05))
        checks.append(Check('clifford_margin', clifford_margin_error(space.n), 1e-12))
        checks.append(Check('lattice_cutoff', lattice_cutoff_change(space.n), 1e-12))
        checks.append(Check('index_ordering', index_ordering_violations(space, R), 0))
        cliff = clifford(space.n, 1)
        if stability_margin(cliff) >= 0.:
            checks.append(Check('supersolution_clifford', supersolution_excess(space, cliff), 1e-12))

    if profile is None or profile.r_max < PROFILE_RANGE * space.R0:
        profile = geometry.areal_profile(space, r_max=PROFILE_RANGE * space.R0, tol=profile_tol)
    rho = PROFILE_RANGE * space.R0
    checks.append(Check('theta_rungs', theta_rung_spread(space, profile, quad_tol), 1e-9))
    checks.append(Check('mu_closed_form', abs(density.mu_volume(space, link, profile, rho, quad_tol)
                                              / density.mu_volume_closed(space, link, profile, rho) - 1.), 1e-9))
    checks.append(Check('monotonicity', max(density.monotonicity_residual(space, link, profile, a * space.R0,
                                                                          b * space.R0, quad_tol)
                                            for a, b in ((0., 1.), (1., 10.), (2., 50.))), 1e-8))
    checks.append(Check('boundary_area', abs(density.boundary_area(space, link)
                                             - density.boundary_area_areal(space, link))
                        / density.boundary_area(space, link), 1e-12))
    distance = geometry.schwarzschild_distance(space, R)
    checks.append(Check('areal_radius', abs(profile.h(distance) - geometry.sphere_area_radius(space, R))
                        / geometry.sphere_area_radius(space, R), 1e-8))
    for check in checks:
        level = logging.DEBUG if check.passed else logging.WARNING
        logger.log(level, '%s %s: %.3e (tolerance %.1e)', space, check.name, check.value, check.tolerance)
    return checks, profile
