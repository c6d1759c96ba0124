# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Index forms of a cone and the aggregation of mode counts into indices.

A separated test function is psi = f_k(p) g(r) with f_k an L^2(Gamma)
normalized eigenfunction of the link Jacobi operator, so every form
below reduces to a radial integral. Integrals are taken in
t = log(r/R0), where dr = r dt.
"""

import enum
import logging
import math
import os
import re
from dataclasses import dataclass, field, replace, asdict

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import DomainError, NumericError
from .numerics import integrate_adaptive_simpson, NULL_PIVOT_TOLERANCE
from . import schwarzschild_geometry as geometry
from . import radial_spectral as radial
from .radial_spectral import InnerBC, OuterBC
from .sphere_link_catalog import jacobi_spectrum, first_eigenvalue

logger = logging.getLogger(__name__)

ENDPOINT_TOLERANCE = 1e-14
QUADRATURE_TOLERANCE = 1e-10
WITNESS_THRESHOLD = -1e-6


class BoundaryClass(enum.Enum):
    VANISH_BOTH = "VanishBoth"
    VANISH_OUTER_ONLY = "VanishOuterOnly"

    def __str__(self):
        return self.value


class DivergenceVerdict(enum.Enum):
    STABLE = "Stable"
    FINITE_AT_THIS_R = "FiniteAtThisR"
    DIVERGENT_TREND = "DivergentTrend"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class SeparatedTestFunction:
    """
    psi = f_k g(r) on the truncated cone over [R0, R].

    :param profile: (callable) g(r), vectorized.
    :param derivative: (callable) g'(r), vectorized.
    :param ivp: (tuple) (j, beta_j) when g is the closed form Dirichlet mode g_j.
    """
    link_level: int
    profile: object
    derivative: object
    R0: float
    R: float
    boundary_class: BoundaryClass = BoundaryClass.VANISH_BOTH
    ivp: tuple = None

    def __post_init__(self):
        outer = abs(float(self.profile(self.R)))
        inner = abs(float(self.profile(self.R0)))
        if outer > ENDPOINT_TOLERANCE:
            raise DomainError('SeparatedTestFunction', 'profile does not vanish on the outer sphere',
                              value=outer)
        if self.boundary_class == BoundaryClass.VANISH_BOTH and inner > ENDPOINT_TOLERANCE:
            raise DomainError('SeparatedTestFunction', 'VanishBoth profile does not vanish on the horizon',
                              value=inner)

    @property
    def log_length(self):
        return math.log(self.R / self.R0)

    @classmethod
    def from_ivp(cls, space, R, k, j):
        """
        f_k g_j with g_j the normalized Dirichlet mode of ivp_mode.
        """
        g, beta, _ = radial.ivp_mode(space, R, j)
        return cls(link_level=k, profile=g, derivative=g.derivative, R0=space.R0, R=R, ivp=(int(j), beta))

    @classmethod
    def sine_series(cls, space, R, k, coefficients):
        """
        g(r) = sum_j c_j sin(j pi log(r/R0) / log(R/R0)), j = 1, 2, ...
        """
        R0 = space.R0
        T = math.log(R / R0)
        c = np.asarray(coefficients, dtype=float)
        omega = np.arange(1, len(c) + 1) * math.pi / T

        def g(r):
            t = np.log(np.asarray(r, dtype=float) / R0)
            value = np.sin(np.multiply.outer(t, omega)) @ c
            # sin(j pi) is not exactly 0 in floating point
            return np.where(np.isclose(t, T, rtol=0., atol=1e-15 * T) | (t == 0.), 0., value)

        def dg(r):
            r = np.asarray(r, dtype=float)
            t = np.log(r / R0)
            return (np.cos(np.multiply.outer(t, omega)) @ (c * omega)) / r

        return cls(link_level=k, profile=g, derivative=dg, R0=R0, R=R)

    @classmethod
    def from_nodes(cls, grid, k, values, boundary_class=BoundaryClass.VANISH_BOTH):
        """
        Cubic spline through node values on a RadialGrid.
        """
        values = np.asarray(values, dtype=float)
        if values.shape != grid.nodes.shape:
            raise DomainError('SeparatedTestFunction', 'node values do not match the grid',
                              values=values.shape, nodes=grid.nodes.shape)
        spline = CubicSpline(grid.nodes, values)
        return cls(link_level=k, profile=spline, derivative=spline.derivative(), R0=float(grid.nodes[0]),
                   R=float(grid.nodes[-1]), boundary_class=boundary_class)

    def require(self, operation, space, R, boundary_class=BoundaryClass.VANISH_BOTH):
        if self.boundary_class != boundary_class:
            raise DomainError(operation, f'needs a {boundary_class} profile', given=str(self.boundary_class))
        if not math.isclose(self.R, R, rel_tol=1e-12) or not math.isclose(self.R0, space.R0, rel_tol=1e-12):
            raise DomainError(operation, 'profile interval does not match', profile=(self.R0, self.R),
                              interval=(space.R0, R))


def _level(link, k):
    return jacobi_spectrum(link, k + 1).level(k)[0]


def _radial_integral(operation, integrand, psi, tol):
    """
    int_0^T integrand(r) dt with r = R0 e^t.
    """
    R0 = psi.R0
    try:
        value, _ = integrate_adaptive_simpson(lambda t: integrand(R0 * math.exp(t)), 0., psi.log_length, tol=tol)
    except NumericError as e:
        raise NumericError(operation, 'quadrature did not converge', k=psi.link_level, R=psi.R) from e
    return value


def q_delta(space, link, psi, R, tol=QUADRATURE_TOLERANCE):
    """
    Euclidean index form Q_delta(R)(psi, psi) of the cone,
    int (g'^2 + lambda_k g^2 / r^2) r^(n-2) dr.

    For the closed form modes this is lambda_k + beta_j exactly.
    """
    psi.require('q_delta', space, R)
    lam = _level(link, psi.link_level)
    if psi.ivp is not None:
        return lam + psi.ivp[1]
    n = space.n

    def integrand(r):
        g = float(psi.profile(r))
        gt = r * float(psi.derivative(r))
        return (gt * gt + lam * g * g) * r ** (n - 3)

    return _radial_integral('q_delta', integrand, psi, tol)


def potential_correction(space, psi, tol=QUADRATURE_TOLERANCE):
    """
    int V g^2 r^(n-2) dr, the gap between the Euclidean and the
    Schwarzschild forms.
    """
    n = space.n

    def integrand(r):
        g = float(psi.profile(r))
        return geometry.radial_potential(space, r) * g * g * r ** (n - 1)

    return _radial_integral('potential_correction', integrand, psi, tol)


def q_schwarzschild(space, link, psi, R, tol=QUADRATURE_TOLERANCE):
    """
    Q_Sigma(R)(F^-1 psi, F^-1 psi) = Q_delta(R)(psi, psi) - int V psi^2.
    """
    psi.require('q_schwarzschild', space, R)
    return q_delta(space, link, psi, R, tol) - potential_correction(space, psi, tol)


def q_direct(space, link, psi, R, tol=QUADRATURE_TOLERANCE):
    """
    Q_Sigma(R)(w, w) for w = F^-1 psi assembled in the Schwarzschild
    picture from |A|^2 and the ambient Ricci curvature.

    With the cone normal orthogonal to the radial field, |A_g|^2 = f^-2 |A_delta|^2
    and dv_g = f^(n-1) dv_delta, so the integrand is
    F^2 (w'^2 + lambda_k w^2 / r^2 - f^2 Ric(xi, xi) w^2) r^(n-2).
    """
    psi.require('q_direct', space, R)
    lam = _level(link, psi.link_level)
    n = space.n

    def integrand(r):
        F = geometry.cone_factor(space, r)
        dF = geometry.cone_factor_derivative(space, r)
        f = geometry.isotropic_factor(space, r)
        g = float(psi.profile(r))
        w = g / F
        dw = float(psi.derivative(r)) / F - g * dF / (F * F)
        ricci = geometry.ambient_normal_ricci(space, r)
        return F * F * (dw * dw + lam * w * w / (r * r) - f * f * ricci * w * w) * r ** (n - 1)

    return _radial_integral('q_direct', integrand, psi, tol)


def conformal_residual(space, link, psi, R, tol=QUADRATURE_TOLERANCE):
    """
    Normalized gap between q_direct and
    Q_delta(R)(psi, psi) - (N/(N-2)) int (F^-1 Delta F) psi^2.
    """
    psi.require('conformal_residual', space, R)
    if space.n < 4:
        raise DomainError('conformal_residual', 'the conformal relation needs n >= 4', n=space.n)
    n, N = space.n, space.N

    def integrand(r):
        g = float(psi.profile(r))
        return geometry.cone_factor_laplacian_ratio(space, r) * g * g * r ** (n - 1)

    lhs = q_direct(space, link, psi, R, tol)
    rhs = q_delta(space, link, psi, R, tol) - N / (N - 2.) * _radial_integral('conformal_residual',
                                                                              integrand, psi, tol)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.)


def log_gap_a(space, R):
    """
    a(R) = (n-2) log(R/R0) / (2 pi).
    """
    if not R > space.R0:
        raise DomainError('log_gap_a', 'R must exceed R0', R=R, R0=space.R0)
    return (space.n - 2) * math.log(R / space.R0) / (2. * math.pi)


def _sech_squared(x):
    e = math.exp(-2. * abs(x))
    return 4. * e / (1. + e) ** 2


def g_term(space, R, j, tol=QUADRATURE_TOLERANCE):
    """
    G_j(R) = ((n-2) j / (2a))^2 - ((n-1) j / (2 pi)) int_0^pi sech^2(a j s) sin^2(s) ds
    with a = log_gap_a(space, R).
    """
    if int(j) != j or j < 1:
        raise DomainError('g_term', 'j must be a positive integer', j=j)
    n = space.n
    a = log_gap_a(space, R)
    result = integrate.quad(lambda s: _sech_squared(a * j * s) * math.sin(s) ** 2, 0., math.pi,
                            epsabs=tol, epsrel=0., limit=200, points=[min(1. / (a * j), math.pi / 2.)],
                            full_output=1)
    if len(result) > 3:
        raise NumericError('g_term', result[3], n=n, R=R, j=j)
    return ((n - 2) * j / (2. * a)) ** 2 - (n - 1) * j / (2. * math.pi) * result[0]


def witness_value(space, link, j, R):
    """
    lambda_1 + ((n-3)/2)^2 + G_j(R); negative values exhibit negative
    directions of the Dirichlet form that grow in number with R.
    """
    if link.ambient_n != space.n:
        raise DomainError('witness_value', 'link and space dimensions differ', n=space.n, ambient_n=link.ambient_n)
    return first_eigenvalue(link) + ((space.n - 3) / 2.) ** 2 + g_term(space, R, j)


def witness_rayleigh(space, link, j, R, tol=QUADRATURE_TOLERANCE):
    """
    Rayleigh quotient of f_1 g_j in the Schwarzschild form,
    lambda_1 + beta_j - int V g_j^2 r^(n-2) dr.
    """
    psi = SeparatedTestFunction.from_ivp(space, R, 0, j)
    return q_schwarzschild(space, link, psi, R, tol)


@dataclass(frozen=True)
class ModeCounts:
    """
    Counts of one link level; steklov is None for degenerate modes.
    """
    k: int
    eigenvalue: float
    multiplicity: int
    skipped: bool
    d_negative: int
    d_nonpositive: int
    f_negative: int
    f_nonpositive: int
    steklov: float
    steklov_degenerate: bool
    robin_negative: int
    refined: bool


@dataclass(frozen=True)
class IndexReport:
    space: geometry.SchwarzschildSpace = field(repr=False)
    link_label: str
    R: float
    k_max: int
    grid_size: int
    per_mode: tuple
    ind_D: int
    null_D: int
    ind_F: int
    null_F: int
    ind_R: int
    null_R: int
    ind_M: int
    ind_M_free: int
    ind_M_direct: int
    degenerate_modes: tuple
    skipped_levels: tuple
    truncation_certified: bool
    refined: bool
    divergence_verdict: DivergenceVerdict
    ladder: tuple = ()
    assumptions: tuple = ()

    CSV_COLUMNS = ('n', 'm', 'link', 'R_over_R0', 'ind_D', 'ind_F', 'ind_R', 'ind_M', 'verdict',
                   'null_D', 'null_F', 'null_R', 'ind_M_free', 'ind_M_direct', 'k_max', 'grid',
                   'truncation_certified', 'refined')

    @property
    def R_over_R0(self):
        return self.R / self.space.R0

    def csv_row(self):
        return (self.space.n, self.space.m, self.link_label, self.R_over_R0, self.ind_D, self.ind_F,
                self.ind_R, self.ind_M, str(self.divergence_verdict), self.null_D, self.null_F,
                self.null_R, self.ind_M_free, self.ind_M_direct, self.k_max, self.grid_size,
                self.truncation_certified, self.refined)

    def to_dict(self):
        d = {k: v for k, v in asdict(self).items() if k != 'space'}
        d['n'] = self.space.n
        d['m'] = self.space.m
        d['R0'] = self.space.R0
        d['R_over_R0'] = self.R_over_R0
        d['divergence_verdict'] = str(self.divergence_verdict)
        d['per_mode'] = [asdict(c) for c in self.per_mode]
        d['ladder'] = [list(x) for x in self.ladder]
        d['degenerate_modes'] = list(self.degenerate_modes)
        d['skipped_levels'] = list(self.skipped_levels)
        d['assumptions'] = list(self.assumptions)
        return d


def _dump_name(link_label, R, k, tag):
    label = re.sub(r'[^A-Za-z0-9_.-]', '_', link_label)
    return f'{label}_R{R:g}_k{k}_{tag}.csv'


def _mode_counts(space, spectrum, k, R, grid, refine, pivot_tolerance, zero_tolerance, dump_dir=None,
                 link_label=''):
    problem = radial.make_mode_problem(space, spectrum.source_link, k, R, spectrum=spectrum)
    lam, mult = problem.mode_eigenvalue, problem.multiplicity
    skipped = radial.analytic_skip(problem)
    d = f = (0, 0)
    refined = True

    def count(inner, outer):
        p = problem.with_bcs(inner, outer)
        if dump_dir:
            radial.dump_mode_matrices(p, grid, os.path.join(dump_dir, _dump_name(link_label, R, k, f'{inner}_{outer}')))
        return radial.count_negative(p, grid, refine=refine, pivot_tolerance=pivot_tolerance,
                                     zero_tolerance=zero_tolerance)

    if not skipped:
        d_result = count(InnerBC.DIRICHLET, OuterBC.DIRICHLET)
        f_result = count(InnerBC.SCHWARZSCHILD_NEUMANN, OuterBC.DIRICHLET)
        d = (d_result.negative_count, d_result.nonpositive_count)
        f = (f_result.negative_count, f_result.nonpositive_count)
        refined = d_result.refined and f_result.refined
    robin = count(InnerBC.SCHWARZSCHILD_NEUMANN, OuterBC.STEKLOV)
    steklov = radial.steklov_value(problem.with_bcs(InnerBC.SCHWARZSCHILD_NEUMANN, OuterBC.STEKLOV))
    logger.debug('level %d (lambda=%g, mult=%d) R=%g skipped=%s D=%s F=%s steklov=%g',
                 k, lam, mult, R, skipped, d, f, steklov.value)
    return ModeCounts(k=k, eigenvalue=lam, multiplicity=mult, skipped=skipped, d_negative=d[0],
                      d_nonpositive=d[1], f_negative=f[0], f_nonpositive=f[1],
                      steklov=None if steklov.degenerate else steklov.value,
                      steklov_degenerate=steklov.degenerate, robin_negative=robin.negative_count,
                      refined=refined), steklov


def dirichlet_index(space, link, R, k_max=12, grid_size=2000, pivot_tolerance=NULL_PIVOT_TOLERANCE,
                    zero_tolerance=radial.ZERO_TOLERANCE):
    """
    ind_D alone, for ladder rungs.
    """
    spectrum = jacobi_spectrum(link, k_max)
    grid = radial.make_grid(space.R0, R, grid_size)
    total = 0
    for k in range(len(spectrum)):
        problem = radial.make_mode_problem(space, link, k, R, InnerBC.DIRICHLET, OuterBC.DIRICHLET,
                                           spectrum=spectrum)
        if radial.analytic_skip(problem):
            continue
        result = radial.count_negative(problem, grid, refine=False, pivot_tolerance=pivot_tolerance,
                                       zero_tolerance=zero_tolerance)
        total += problem.multiplicity * result.nonpositive_count
    return total


def _verdict(ind_F, ladder):
    counts = [c for _, c in ladder]
    if len(counts) >= 3 and counts[-3] < counts[-2] < counts[-1]:
        return DivergenceVerdict.DIVERGENT_TREND
    if ind_F == 0:
        return DivergenceVerdict.STABLE
    return DivergenceVerdict.FINITE_AT_THIS_R


def index_report(space, link, R, k_max=12, grid_size=2000, ladder=None, steklov_tol=radial.STEKLOV_TOLERANCE,
                 zero_tolerance=radial.ZERO_TOLERANCE, pivot_tolerance=NULL_PIVOT_TOLERANCE, refine=True,
                 dump_dir=None):
    """
    Aggregate per level counts into the indices of the truncated cone.

    :param space: (SchwarzschildSpace)
    :param link: (MinimalLink)
    :param R: (float) outer radius, R > R0.
    :param k_max: (int) number of distinct link levels.
    :param grid_size: (int) nodes of the radial grid.
    :param ladder: (iterable) smaller radii for the divergence trend; defaults
        to R/4, R/2 (rungs at or below R0 are dropped); () disables the trend.
    :param dump_dir: (str) write the assembled matrices of every mode here.
    :return: (IndexReport)
    """
    if not R > space.R0:
        raise DomainError('index_report', 'R must exceed R0', R=R, R0=space.R0)
    if int(k_max) != k_max or k_max < 1:
        raise DomainError('index_report', 'k_max must be a positive integer', k_max=k_max)
    spectrum = jacobi_spectrum(link, int(k_max))
    grid = radial.make_grid(space.R0, R, grid_size)

    modes = []
    ind = dict(D=0, null_D=0, F=0, null_F=0, R=0, null_R=0, direct=0)
    degenerate = []
    for k in range(len(spectrum)):
        try:
            counts, steklov = _mode_counts(space, spectrum, k, R, grid, refine, pivot_tolerance, zero_tolerance,
                                           dump_dir, link.label)
        except NumericError as e:
            raise NumericError('index_report', str(e), pivot_index=e.pivot_index, n=space.n,
                               link=link.label, R=R, k=k) from e
        mult = counts.multiplicity
        modes.append(counts)
        ind['D'] += mult * counts.d_nonpositive
        ind['null_D'] += mult * (counts.d_nonpositive - counts.d_negative)
        ind['F'] += mult * counts.f_negative
        ind['null_F'] += mult * (counts.f_nonpositive - counts.f_negative)
        ind['direct'] += mult * counts.robin_negative
        if steklov.degenerate:
            degenerate.append(k)
        elif steklov.is_null(steklov_tol):
            ind['null_R'] += mult
        elif steklov.contributes(steklov_tol):
            ind['R'] += mult

    # the Dirichlet decomposition is the index; the free boundary sum and
    # the discrete Robin count are kept to record disagreements
    ind_M = ind['D'] + ind['null_D'] + ind['R']
    ind_M_free = ind['F'] + ind['null_F'] + ind['R']
    if ind_M != ind_M_free:
        logger.info('%s %s R=%g: ind_D + null_D + ind_R = %d, ind_F + null_F + ind_R = %d',
                    space, link.label, R, ind_M, ind_M_free)
    if ind_M != ind['direct']:
        logger.info('%s %s R=%g: discrete Robin count %d differs from ind_M %d',
                    space, link.label, R, ind['direct'], ind_M)

    if ladder is None:
        ladder = [r for r in (R / 4., R / 2.) if r > space.R0 * (1. + 1e-9)]
    rungs = tuple((float(r), dirichlet_index(space, link, r, k_max, grid_size, pivot_tolerance, zero_tolerance))
                  for r in sorted(ladder)) + ((float(R), ind['D']),)

    skipped = tuple(c.k for c in modes if c.skipped)
    refined = all(c.refined for c in modes)
    if not refined:
        logger.warning('%s %s R=%g: counts not stable under grid refinement', space, link.label, R)
    return IndexReport(space=space, link_label=link.label, R=float(R), k_max=int(k_max), grid_size=grid.size,
                       per_mode=tuple(modes), ind_D=ind['D'], null_D=ind['null_D'], ind_F=ind['F'],
                       null_F=ind['null_F'], ind_R=ind['R'], null_R=ind['null_R'], ind_M=ind_M,
                       ind_M_free=ind_M_free, ind_M_direct=ind['direct'], degenerate_modes=tuple(degenerate),
                       skipped_levels=skipped, truncation_certified=bool(modes) and modes[-1].skipped,
                       refined=refined, divergence_verdict=_verdict(ind['F'], rungs), ladder=rungs,
                       assumptions=tuple(link.assumptions))


def index_sweep(space, link, R_values, **kwargs):
    """
    Reports over increasing radii. With three or more radii the sweep
    itself is the ladder of every verdict.
    """
    R_values = sorted(float(r) for r in R_values)
    if len(R_values) < 3:
        return [index_report(space, link, R, **kwargs) for R in R_values]
    return apply_sweep_ladder([index_report(space, link, R, ladder=(), **kwargs) for R in R_values])


def apply_sweep_ladder(reports):
    """
    Re-derive verdicts of reports of one cone using the reports up to each
    radius as ladder.
    """
    reports = sorted(reports, key=lambda r: r.R)
    swept = []
    for i, report in enumerate(reports):
        rungs = tuple((r.R, r.ind_D) for r in reports[:i + 1])
        swept.append(replace(report, ladder=rungs, divergence_verdict=_verdict(report.ind_F, rungs)))
    return swept
