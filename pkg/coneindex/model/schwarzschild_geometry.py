# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Riemannian Schwarzschild manifold of dimension n and mass m.

In the isotropic chart the metric is g = f(r)^2 delta on |x| >= R0 with

    f(r) = (1 + m / (2 r^(n-2)))^(2/(n-2)),

and a cone of dimension N = n - 1 carries the induced metric
F(r)^(4/(N-2)) delta with F(r) = (1 + m / (2 r^(n-2)))^((N-2)/(n-2)).
In the polar chart g = dr^2 + h(r)^2 g_S, where h is the areal radius;
h is tabulated by ArealProfile.
"""

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, NumericError
from .numerics import rk4_integrate

logger = logging.getLogger(__name__)

# radii closer than this (relative) to R0 are treated as R0
HORIZON_SLACK = 1e-12


@dataclass(frozen=True)
class SchwarzschildSpace:
    """
    Ambient geometry: dimension n, mass m and the horizon radii.

    R0 is the isotropic horizon radius, s0 the areal one, N the dimension
    of a cone through the horizon.
    """
    n: int
    m: float
    R0: float
    s0: float

    @property
    def N(self):
        return self.n - 1

    def __str__(self):
        return f"n={self.n},m={self.m:g}"


def _power(base, exponent):
    """
    base ** exponent through exp/log; base must be positive.
    """
    base = np.asarray(base, dtype=float)
    if np.any(base <= 0.):
        raise DomainError('power', 'non positive base for fractional power', exponent=exponent)
    return np.exp(exponent * np.log(base))


def _scalar(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _radius(space, r, operation):
    r = np.asarray(r, dtype=float)
    if np.any(r < space.R0 * (1. - HORIZON_SLACK)):
        raise DomainError(operation, 'radius below the horizon', r=_scalar(np.min(r)), R0=space.R0)
    return np.maximum(r, space.R0)


def make_space(n, m):
    """
    Build the Schwarzschild space of dimension n and mass m.

    :param n: (int) ambient dimension, n >= 3.
    :param m: (float) mass, m > 0.
    :return: (SchwarzschildSpace)
    """
    if int(n) != n or n < 3:
        raise DomainError('make_space', 'dimension must be an integer >= 3', n=n)
    if not m > 0.:
        raise DomainError('make_space', 'mass must be positive', m=m)
    n = int(n)
    m = float(m)
    R0 = math.exp(math.log(m / 2.) / (n - 2))
    s0 = math.exp(math.log(2. * m) / (n - 2))
    return SchwarzschildSpace(n=n, m=m, R0=R0, s0=s0)


def _base(space, r):
    # 1 + m / (2 r^(n-2))
    return 1. + space.m / (2. * _power(r, space.n - 2))


def isotropic_factor(space, r):
    """
    Conformal factor f(r) of g_Sch = f^2 delta.
    """
    r = _radius(space, r, 'isotropic_factor')
    return _scalar(_power(_base(space, r), 2. / (space.n - 2)))


def cone_factor(space, r):
    """
    Conformal factor F(r) of the induced cone metric F^(4/(N-2)) delta.
    """
    r = _radius(space, r, 'cone_factor')
    return _scalar(_power(_base(space, r), (space.N - 2.) / (space.n - 2)))


def cone_factor_derivative(space, r):
    """
    Closed form of F'(r).
    """
    r = _radius(space, r, 'cone_factor_derivative')
    n, N, m = space.n, space.N, space.m
    value = -(N - 2.) * (m / 2.) * _power(r, 1. - n) * _power(_base(space, r), (N - 2.) / (n - 2) - 1.)
    return _scalar(value)


def cone_factor_laplacian_ratio(space, r):
    """
    F^-1 Delta_delta F on the cone, (F'' + (N-1) F'/r) / F, from the
    derivatives of log F.
    """
    r = _radius(space, r, 'cone_factor_laplacian_ratio')
    n, N = space.n, space.N
    c = (N - 2.) / (n - 2)
    y = space.m / (2. * _power(r, n - 2))
    dy = -(n - 2) * y / r
    ddy = (n - 2) * (n - 1) * y / (r * r)
    dlog = c * dy / (1. + y)
    ddlog = c * (ddy * (1. + y) - dy * dy) / (1. + y) ** 2
    return _scalar(ddlog + dlog * dlog + (N - 1) * dlog / r)


def isotropic_factor_log_derivative(space, r):
    """
    phi'(r) where f = exp(phi).
    """
    r = _radius(space, r, 'isotropic_factor_log_derivative')
    n, m = space.n, space.m
    return _scalar(-m / (_power(r, n - 1) + 0.5 * m * r))


def isotropic_factor_log_second_derivative(space, r):
    """
    phi''(r) where f = exp(phi).
    """
    r = _radius(space, r, 'isotropic_factor_log_second_derivative')
    n, m = space.n, space.m
    d = _power(r, n - 1) + 0.5 * m * r
    dd = (n - 1) * _power(r, n - 2) + 0.5 * m
    return _scalar(m * dd / (d * d))


def ambient_normal_ricci(space, r):
    """
    Ric_g(xi, xi) for a g-unit normal xi of a cone through the origin.

    The normal of a cone is orthogonal to the radial direction, so the
    conformal change formula reduces to
    -f^-2 (phi'' + (2n-3) phi'/r + (n-2) phi'^2).
    """
    r = _radius(space, r, 'ambient_normal_ricci')
    n = space.n
    dphi = np.asarray(isotropic_factor_log_derivative(space, r))
    ddphi = np.asarray(isotropic_factor_log_second_derivative(space, r))
    f = np.asarray(isotropic_factor(space, r))
    return _scalar(-(ddphi + (2 * n - 3) * dphi / r + (n - 2) * dphi * dphi) / (f * f))


def umbilicity(space, R):
    """
    kappa(R): the sphere S(R) is totally umbilic in g_Sch with second
    fundamental form -kappa(R) g with respect to the outward normal.
    """
    R = _radius(space, R, 'umbilicity')
    n = space.n
    a = _power(R, n - 2)
    b = space.R0 ** (n - 2)
    return _scalar((a - b) * R / _power(a + b, n / (n - 2.)))


def radial_potential(space, r):
    """
    V(r) = (N/(N-2)) F^-1 Delta_delta F in closed form,
    m (n-1) / (2 r^n) * (2 r^(n-2) / (m + 2 r^(n-2)))^2.
    """
    r = _radius(space, r, 'radial_potential')
    n, m = space.n, space.m
    p = 2. * _power(r, n - 2)
    return _scalar(m * (n - 1) / (2. * _power(r, n)) * (p / (m + p)) ** 2)


def sphere_area_radius(space, R):
    """
    Areal radius R f(R) of the coordinate sphere S(R).
    """
    R = _radius(space, R, 'sphere_area_radius')
    return _scalar(R * np.asarray(isotropic_factor(space, R)))


def schwarzschild_distance(space, R):
    """
    Distance from the horizon to S(R), the integral of f from R0 to R.
    """
    R = float(_radius(space, R, 'schwarzschild_distance'))
    if R == space.R0:
        return 0.
    # log variable keeps the integrand tame on long intervals
    T = math.log(R / space.R0)
    value, _ = integrate.quad(lambda t: space.R0 * math.exp(t) * isotropic_factor(space, space.R0 * math.exp(t)),
                              0., T, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


@dataclass(frozen=True, eq=False)
class ArealProfile:
    """
    Tabulated areal radius h(r) and static potential h'(r) along the
    Schwarzschild distance r measured from the horizon.
    """
    space: SchwarzschildSpace
    grid: np.ndarray
    h_values: np.ndarray
    hprime_values: np.ndarray
    interpolation_order: int = 3
    tol: float = 1e-10
    _h: object = field(default=None, repr=False, compare=False)
    _hprime: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n, m = self.space.n, self.space.m
        hsecond = m * (n - 2) * self.h_values ** (1 - n)
        object.__setattr__(self, '_h', CubicHermiteSpline(self.grid, self.h_values, self.hprime_values))
        object.__setattr__(self, '_hprime', CubicHermiteSpline(self.grid, self.hprime_values, hsecond))

    @property
    def r_max(self):
        return float(self.grid[-1])

    def _check(self, r, operation):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.) or np.any(r > self.r_max * (1. + 1e-12)):
            raise DomainError(operation, 'outside the profile range', r=_scalar(r), r_max=self.r_max)
        return np.clip(r, 0., self.r_max)

    def h(self, r):
        return _scalar(self._h(self._check(r, 'ArealProfile.h')))

    def hprime(self, r):
        """
        Static potential f = h'(r).
        """
        return _scalar(self._hprime(self._check(r, 'ArealProfile.hprime')))

    def divergence_x(self, r):
        """
        div_Sigma X of the conformal field X = h(r) d/dr on a cone, (n-1) h'(r).
        """
        return _scalar((self.space.n - 1) * np.asarray(self.hprime(r)))

    def residual(self, r):
        """
        |h' - sqrt(1 - 2m h^(2-n))| at r.
        """
        r = self._check(r, 'ArealProfile.residual')
        return _scalar(np.abs(self._hprime(r) - static_potential(self.space, self._h(r))))

    def to_csv(self, path):
        with open(path, 'w', newline='') as fh:
            writer = csv.writer(fh)
            writer.writerow(['r', 'h', 'hprime'])
            for row in zip(self.grid, self.h_values, self.hprime_values):
                writer.writerow([repr(float(v)) for v in row])


def static_potential(space, h):
    """
    sqrt(1 - 2m h^(2-n)) for an areal radius h >= s0, written with expm1
    so the cancellation near the horizon stays accurate.
    """
    h = np.asarray(h, dtype=float)
    arg = -np.expm1((2 - space.n) * np.log(np.maximum(h, space.s0) / space.s0))
    return _scalar(np.sqrt(np.maximum(arg, 0.)))


def _profile_nodes(space, r_max, nodes):
    # graded grid, fine near the horizon where h'' is largest
    x = np.linspace(0., math.log1p(r_max / space.s0), nodes)
    grid = space.s0 * np.expm1(x)
    grid[-1] = r_max
    return grid


def areal_profile(space, r_max=None, tol=1e-10, nodes=4000, max_refinements=3):
    """
    Integrate h' = sqrt(1 - 2m h^(2-n)), h(0) = s0, on [0, r_max].

    The first step uses the even series h = s0 + c r^2 + d r^4 obtained by
    differentiating the ODE; the remaining steps use RK4 on the regular
    second order form h'' = m (n-2) h^(1-n), whose first integral is the
    original equation.

    :param space: (SchwarzschildSpace)
    :param r_max: (float) range of the profile, default 1000 R0.
    :param tol: (float) residual tolerance at the nodes (10 tol at midpoints).
    :param nodes: (int) number of grid nodes of the first attempt.
    :param max_refinements: (int) node doublings before giving up.
    :return: (ArealProfile)
    """
    if r_max is None:
        r_max = 1e3 * space.R0
    if not r_max > 0. or not tol > 0.:
        raise DomainError('areal_profile', 'r_max and tol must be positive', r_max=r_max, tol=tol)
    n, m, s0 = space.n, space.m, space.s0
    c = m * (n - 2) * s0 ** (1 - n) / 2.
    d = (1 - n) * (m * (n - 2)) ** 2 * s0 ** (1 - 2 * n) / 24.

    def rhs(_, y):
        return np.array([y[1], m * (n - 2) * y[0] ** (1 - n)])

    for attempt in range(max_refinements + 1):
        grid = _profile_nodes(space, r_max, nodes)
        r1 = grid[1]
        y1 = np.array([s0 + c * r1 ** 2 + d * r1 ** 4, 2. * c * r1 + 4. * d * r1 ** 3])
        ys = np.empty((len(grid), 2))
        ys[0] = (s0, 0.)
        ys[1:] = rk4_integrate(rhs, grid[1:], y1)
        profile = ArealProfile(space=space, grid=grid, h_values=ys[:, 0].copy(),
                               hprime_values=ys[:, 1].copy(), tol=tol)
        node_residual = float(np.max(np.abs(ys[:, 1] - static_potential(space, ys[:, 0]))))
        mid_residual = float(np.max(profile.residual(0.5 * (grid[1:] + grid[:-1]))))
        logger.debug('areal profile %s nodes=%d residual nodes=%.3e midpoints=%.3e',
                     space, nodes, node_residual, mid_residual)
        if node_residual <= tol and mid_residual <= 10. * tol:
            return profile
        nodes *= 2
    raise NumericError('areal_profile', 'ODE residual above tolerance', n=n, m=m,
                       r_max=r_max, tol=tol, residual=max(node_residual, mid_residual / 10.))
