# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Densities at infinity of cones in the polar picture g = dr^2 + h(r)^2 g_S.

The cone over a link Gamma is Sigma = [0, oo) x Gamma with induced metric
dr^2 + h^2 g_Gamma. Two measures appear: the Riemannian volume and the
measure mu weighted by the static potential h'.
"""

import enum
import logging
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DomainError
from .numerics import integrate_adaptive_simpson
from . import schwarzschild_geometry as geometry
from .sphere_link_catalog import sphere_volume

logger = logging.getLogger(__name__)

QUADRATURE_TOLERANCE = 1e-10
EQUALITY_SLACK = 1e-8
WILLMORE_THRESHOLD = 2. * math.pi ** 2


class RigidityClass(enum.Enum):
    EQUALITY_CONE = "EqualityCone"
    STRICT_INEQUALITY = "StrictInequality"

    def __str__(self):
        return self.value


class WillmoreFlag(enum.Enum):
    BELOW_THRESHOLD = "BelowThreshold"
    ABOVE_THRESHOLD = "AboveThreshold"
    NOT_APPLICABLE = "NotApplicable"

    def __str__(self):
        return self.value


class AllardFlag(enum.Enum):
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ThetaEstimate:
    rungs: tuple
    extrapolated: float
    differences: tuple


@dataclass(frozen=True)
class Rigidity:
    rigidity_class: RigidityClass
    willmore_flag: WillmoreFlag
    willmore_label: str
    allard_flag: AllardFlag
    allard_excess: float
    boundary_case: bool


def _check_rho(operation, profile, rho):
    if rho < 0. or rho > profile.r_max * (1. + 1e-12):
        raise DomainError(operation, 'rho outside the profile range', rho=rho, r_max=profile.r_max)
    return min(float(rho), profile.r_max)


def _integrate(integrand, rho, scale, tol):
    value, _ = integrate_adaptive_simpson(integrand, 0., rho, tol=tol * max(scale, 1.))
    return value


def mu_volume(space, link, profile, rho, tol=QUADRATURE_TOLERANCE):
    """
    mu(Sigma cap B_rho) = |Gamma| int_0^rho h'(r) h(r)^(n-2) dr.
    """
    rho = _check_rho('mu_volume', profile, rho)
    n = space.n
    scale = profile.h(rho) ** (n - 1) / (n - 1)
    value = _integrate(lambda r: profile.hprime(r) * profile.h(r) ** (n - 2), rho, scale, tol)
    return link.volume * value


def mu_volume_closed(space, link, profile, rho):
    """
    |Gamma| (h(rho)^(n-1) - s0^(n-1)) / (n-1).
    """
    rho = _check_rho('mu_volume_closed', profile, rho)
    n = space.n
    return link.volume * (profile.h(rho) ** (n - 1) - space.s0 ** (n - 1)) / (n - 1)


def schwarzschild_volume(space, link, profile, rho, tol=QUADRATURE_TOLERANCE):
    """
    Riemannian volume |Gamma| int_0^rho h(r)^(n-2) dr of Sigma cap B_rho.
    """
    rho = _check_rho('schwarzschild_volume', profile, rho)
    n = space.n
    scale = profile.h(rho) ** (n - 1) / (n - 1)
    return link.volume * _integrate(lambda r: profile.h(r) ** (n - 2), rho, scale, tol)


def bridging_ratio(space, link, profile, rho, tol=QUADRATURE_TOLERANCE):
    """
    (n-1) vol(Sigma cap B_rho) / (|Gamma| h(rho)^(n-1)); tends to 1.
    """
    if not rho > 0.:
        raise DomainError('bridging_ratio', 'rho must be positive', rho=rho)
    n = space.n
    return (n - 1) * schwarzschild_volume(space, link, profile, rho, tol) / (link.volume * profile.h(rho) ** (n - 1))


def _aitken(values):
    if len(values) < 3:
        return values[-1]
    x0, x1, x2 = values[-3:]
    denominator = x2 - 2. * x1 + x0
    if denominator == 0. or not math.isfinite(denominator):
        return x2
    return x2 - (x2 - x1) ** 2 / denominator


def theta(space, subject_link, reference_link, profile, rho_ladder, tol=QUADRATURE_TOLERANCE):
    """
    Volume ratios vol(Sigma_subject cap B_rho) / vol(Sigma_reference cap B_rho)
    along a ladder, extrapolated with Aitken's delta squared on the last
    three rungs.

    :return: (ThetaEstimate)
    """
    ladder = [float(r) for r in rho_ladder]
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[0] <= 0.:
        raise DomainError('theta', 'ladder must be positive and increasing', ladder=ladder)
    rungs = []
    for rho in ladder:
        ratio = schwarzschild_volume(space, subject_link, profile, rho, tol) / \
            schwarzschild_volume(space, reference_link, profile, rho, tol)
        rungs.append((rho, ratio))
    values = [v for _, v in rungs]
    differences = tuple(abs(b - a) for a, b in zip(values, values[1:]))
    return ThetaEstimate(rungs=tuple(rungs), extrapolated=_aitken(values), differences=differences)


def boundary_area(space, link):
    """
    area(boundary of Sigma) = 2m |Gamma|.
    """
    return 2. * space.m * link.volume


def boundary_area_areal(space, link):
    """
    The same area measured in g_Sch, (R0 f(R0))^(n-2) |Gamma|.
    """
    return (space.R0 * geometry.isotropic_factor(space, space.R0)) ** (space.n - 2) * link.volume


def theta_closed(space, subject_link, reference_link):
    """
    area(boundary of Sigma_subject) / (2m |Gamma_reference|); the term with
    the normal part of the radial field vanishes on cones.
    """
    return boundary_area(space, subject_link) / (2. * space.m * reference_link.volume)


def perpendicular_term(space, link, profile, sigma, rho):
    """
    int f h^(1-n) |d_r^perp|^2 over Sigma cap (B_rho minus B_sigma), zero on cones.
    """
    _check_rho('perpendicular_term', profile, rho)
    return 0.


def monotonicity_residual(space, link, profile, sigma, rho, tol=QUADRATURE_TOLERANCE):
    """
    Normalized gap between the two sides of

        mu(B_rho) / h(rho)^(n-1) = mu(B_sigma) / h(sigma)^(n-1)
            + s0 / (n-1) (h(sigma)^(1-n) - h(rho)^(1-n)) area(boundary)
            + perpendicular term.
    """
    if not 0. <= sigma <= rho:
        raise DomainError('monotonicity_residual', 'needs 0 <= sigma <= rho', sigma=sigma, rho=rho)
    n = space.n
    h_rho, h_sigma = profile.h(rho), profile.h(sigma)
    lhs = mu_volume(space, link, profile, rho, tol) / h_rho ** (n - 1)
    rhs = mu_volume(space, link, profile, sigma, tol) / h_sigma ** (n - 1) \
        + space.s0 / (n - 1) * (h_sigma ** (1 - n) - h_rho ** (1 - n)) * boundary_area(space, link) \
        + perpendicular_term(space, link, profile, sigma, rho)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), np.finfo(float).tiny)


def rigidity_classify(space, subject_link, theta_value, reference_link):
    """
    Compare 2m |Gamma| theta with area(boundary) and, for n = 4, |Gamma| theta
    with 2 pi^2. Values within the slack of a threshold are reported on the
    non rigid side with boundary_case set.

    :return: (Rigidity)
    """
    if not math.isfinite(theta_value):
        raise DomainError('rigidity_classify', 'theta must be finite', theta=theta_value)
    area = boundary_area(space, subject_link)
    scale = max(abs(area), 1.)
    gap = 2. * space.m * reference_link.volume * theta_value - area
    rigidity = RigidityClass.EQUALITY_CONE if abs(gap) <= EQUALITY_SLACK * scale \
        else RigidityClass.STRICT_INEQUALITY

    weighted = reference_link.volume * theta_value
    boundary_case = False
    label = ''
    if space.n != 4:
        willmore = WillmoreFlag.NOT_APPLICABLE
    else:
        slack = EQUALITY_SLACK * max(WILLMORE_THRESHOLD, 1.)
        if abs(weighted - WILLMORE_THRESHOLD) <= slack:
            willmore, boundary_case, label = WillmoreFlag.ABOVE_THRESHOLD, True, 'clifford'
        elif weighted < WILLMORE_THRESHOLD:
            willmore = WillmoreFlag.BELOW_THRESHOLD
            label = 'equator' if abs(weighted - 4. * math.pi) <= EQUALITY_SLACK * 4. * math.pi else 'inconsistent'
        else:
            willmore = WillmoreFlag.ABOVE_THRESHOLD
    if label == 'inconsistent':
        logger.warning('density %g below the Willmore threshold but not the equator value', weighted)
    return Rigidity(rigidity_class=rigidity, willmore_flag=willmore, willmore_label=label,
                    allard_flag=AllardFlag.INDETERMINATE,
                    allard_excess=weighted - sphere_volume(space.n - 2), boundary_case=boundary_case)


@dataclass(frozen=True)
class DensityReport:
    n: int
    m: float
    subject_label: str
    reference_label: str
    theta_numeric: float
    theta_rungs: tuple
    theta_closed: float
    boundary_area: float
    monotonicity_residual: float
    mu_closed_form_error: float
    bridging_ratio: float
    equality_gap: float
    rigidity_class: RigidityClass
    willmore_flag: WillmoreFlag
    willmore_label: str
    boundary_case: bool
    allard_flag: AllardFlag
    allard_excess: float

    CSV_COLUMNS = ('n', 'm', 'subject', 'reference', 'theta_numeric', 'theta_closed', 'boundary_area',
                   'equality_gap', 'monotonicity_residual', 'rigidity_class', 'willmore_flag', 'allard_flag')

    def csv_row(self):
        return (self.n, self.m, self.subject_label, self.reference_label, self.theta_numeric, self.theta_closed,
                self.boundary_area, self.equality_gap, self.monotonicity_residual, str(self.rigidity_class),
                str(self.willmore_flag), str(self.allard_flag))

    def to_dict(self):
        d = asdict(self)
        d['theta_rungs'] = [list(x) for x in self.theta_rungs]
        for key in ('rigidity_class', 'willmore_flag', 'allard_flag'):
            d[key] = str(d[key])
        return d


def density_report(space, subject_link, reference_link, profile=None, rho_ladder=(10., 100., 1000.),
                   tol=QUADRATURE_TOLERANCE, profile_tol=1e-10):
    """
    Density of the cone over subject_link relative to reference_link.

    :param rho_ladder: (iterable) distances from the horizon in units of R0.
    :param profile: (ArealProfile) reused when it covers the ladder.
    :return: (DensityReport)
    """
    for link in (subject_link, reference_link):
        if link.ambient_n != space.n:
            raise DomainError('density_report', 'link and space dimensions differ', n=space.n,
                              ambient_n=link.ambient_n, link=link.label)
    ladder = sorted(float(r) * space.R0 for r in rho_ladder)
    if profile is None or profile.r_max < ladder[-1]:
        profile = geometry.areal_profile(space, r_max=ladder[-1], tol=profile_tol)

    estimate = theta(space, subject_link, reference_link, profile, ladder, tol)
    closed = theta_closed(space, subject_link, reference_link)
    area = boundary_area(space, subject_link)
    stops = [0.] + ladder
    monotonicity = max(monotonicity_residual(space, subject_link, profile, a, b, tol)
                       for a, b in zip(stops, stops[1:]))
    mu_error = max(abs(mu_volume(space, subject_link, profile, rho, tol)
                       / mu_volume_closed(space, subject_link, profile, rho) - 1.) for rho in ladder)
    rigidity = rigidity_classify(space, subject_link, estimate.extrapolated, reference_link)
    logger.debug('density %s %s/%s theta=%.12g closed=%.12g', space, subject_link.label, reference_link.label,
                 estimate.extrapolated, closed)
    return DensityReport(n=space.n, m=space.m, subject_label=subject_link.label,
                         reference_label=reference_link.label, theta_numeric=estimate.extrapolated,
                         theta_rungs=estimate.rungs, theta_closed=closed, boundary_area=area,
                         monotonicity_residual=monotonicity, mu_closed_form_error=mu_error,
                         bridging_ratio=bridging_ratio(space, subject_link, profile, ladder[-1], tol),
                         equality_gap=2. * space.m * reference_link.volume * estimate.extrapolated - area,
                         rigidity_class=rigidity.rigidity_class, willmore_flag=rigidity.willmore_flag,
                         willmore_label=rigidity.willmore_label, boundary_case=rigidity.boundary_case,
                         allard_flag=rigidity.allard_flag, allard_excess=rigidity.allard_excess)
