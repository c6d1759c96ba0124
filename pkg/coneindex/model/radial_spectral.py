# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Radial (separated) spectral problems of a cone over a link.

Separating variables psi = f_k(p) u(r), the Jacobi equation in the
Euclidean picture reduces, for the link level lambda_k, to

    L_k u = u'' + (N-1)/r u' + V(r) u - lambda_k / r^2 u

on [R0, R], with eigenvalue weight F^(4/(N-2)) = f^2. Everything here is
assembled in the variable t = log(r/R0), where

    Q_k(u) = int_0^T (u_t^2 + (lambda_k - r^2 V) u^2) r^(n-3) dt
             - (n-3)/2 R0^(n-3) u(0)^2            (horizon, free)
             - (1 + (N/2) R phi'(R)) R^(n-3) u(T)^2   (outer sphere, free)

and the last two terms are present only for the free boundary conditions.
"""

import csv
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import eigvalsh_tridiagonal

from .errors import DomainError, NumericError
from .numerics import ldl_inertia, NULL_PIVOT_TOLERANCE
from . import schwarzschild_geometry as geometry
from .sphere_link_catalog import jacobi_spectrum

logger = logging.getLogger(__name__)

MIN_GRID_SIZE = 16
ZERO_TOLERANCE = 1e-8
STEKLOV_TOLERANCE = 1e-6


class InnerBC(enum.Enum):
    DIRICHLET = "dirichlet"
    SCHWARZSCHILD_NEUMANN = "neumann"

    def __str__(self):
        return self.value


class OuterBC(enum.Enum):
    DIRICHLET = "dirichlet"
    STEKLOV = "steklov"

    def __str__(self):
        return self.value


class WeightKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SCHWARZSCHILD = "schwarzschild"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ModeProblem:
    """
    One radial Sturm-Liouville problem on [R0, R] for the link level k.
    """
    space: geometry.SchwarzschildSpace
    mode_eigenvalue: float
    R: float
    inner_bc: InnerBC = InnerBC.SCHWARZSCHILD_NEUMANN
    outer_bc: OuterBC = OuterBC.DIRICHLET
    weight_kind: WeightKind = WeightKind.SCHWARZSCHILD
    k: int = 0
    multiplicity: int = 1

    @property
    def interval(self):
        return self.space.R0, self.R

    @property
    def log_length(self):
        return math.log(self.R / self.space.R0)

    @property
    def robin_coefficient(self):
        """
        c in v'(R0) + c v(R0) = 0, the free horizon condition in the
        Euclidean picture: c = -F'(R0)/F(R0) = (n-3)/(2 R0).
        """
        n = self.space.n
        return (n - 3) / (2. * self.space.R0)

    @property
    def steklov_weight(self):
        return geometry.umbilicity(self.space, self.R)

    def with_bcs(self, inner_bc, outer_bc):
        return ModeProblem(space=self.space, mode_eigenvalue=self.mode_eigenvalue, R=self.R,
                           inner_bc=inner_bc, outer_bc=outer_bc, weight_kind=self.weight_kind,
                           k=self.k, multiplicity=self.multiplicity)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Log spaced nodes on [R0, R].
    """
    nodes: np.ndarray

    @property
    def size(self):
        return len(self.nodes)

    @property
    def t(self):
        return np.log(self.nodes / self.nodes[0])

    @property
    def step(self):
        return math.log(self.nodes[-1] / self.nodes[0]) / (self.size - 1)

    def refined(self):
        """
        Grid with twice the number of intervals.
        """
        return make_grid(self.nodes[0], self.nodes[-1], 2 * (self.size - 1) + 1)


@dataclass(frozen=True)
class ModeSpectrumResult:
    negative_count: int
    nonpositive_count: int
    smallest_eigenvalues: tuple
    grid_size: int
    refined: bool


def make_grid(R0, R, size):
    """
    :param R0: (float) first node.
    :param R: (float) last node, R > R0.
    :param size: (int) number of nodes, at least 16.
    :return: (RadialGrid)
    """
    if not R > R0:
        raise DomainError('make_grid', 'interval must satisfy R > R0', R0=R0, R=R)
    if int(size) != size or size < MIN_GRID_SIZE:
        raise DomainError('make_grid', f'grid size must be an integer >= {MIN_GRID_SIZE}', size=size)
    T = math.log(R / R0)
    nodes = R0 * np.exp(np.linspace(0., T, int(size)))
    nodes[0], nodes[-1] = R0, R
    return RadialGrid(nodes=nodes)


def ivp_mode(space, R, j):
    """
    Dirichlet eigenfunction of -r^2 g'' - (n-2) r g' = beta g on [R0, R].

    g_j(r) = c_j r^(-(n-3)/2) sin(j pi log(r/R0) / log(R/R0)) with c_j chosen
    so that int g_j^2 r^(n-4) dr = 1.

    :return: (callable, float, float) g_j (with a `derivative` attribute), beta_j, c_j
    """
    if not R > space.R0:
        raise DomainError('ivp_mode', 'R must exceed R0', R=R, R0=space.R0)
    if int(j) != j or j < 1:
        raise DomainError('ivp_mode', 'j must be a positive integer', j=j)
    n, R0 = space.n, space.R0
    T = math.log(R / R0)
    omega = j * math.pi / T
    a = (n - 3) / 2.
    beta = a * a + omega * omega
    c = math.sqrt(2. / T)

    def g(r):
        r = np.asarray(r, dtype=float)
        return c * r ** (-a) * np.sin(omega * np.log(r / R0))

    def dg(r):
        r = np.asarray(r, dtype=float)
        s = omega * np.log(r / R0)
        return c * r ** (-a - 1.) * (omega * np.cos(s) - a * np.sin(s))

    def ddg(r):
        r = np.asarray(r, dtype=float)
        s = omega * np.log(r / R0)
        return c * r ** (-a - 2.) * ((a * (a + 1.) - omega * omega) * np.sin(s) - (2. * a + 1.) * omega * np.cos(s))

    g.derivative = dg
    g.second_derivative = ddg
    return g, beta, c


def wk_potential(space, lambda_k, r):
    """
    W_k(r) = V(r) - (4 lambda_k + (n-2)(n-4)) / (4 r^2).
    """
    n = space.n
    r = np.asarray(r, dtype=float)
    V = np.asarray(geometry.radial_potential(space, r))
    return geometry._scalar(V - (4. * lambda_k + (n - 2) * (n - 4)) / (4. * r * r))


def closed_form_v(space, r):
    """
    v(r) = (2 r^(n-2) / (m + 2 r^(n-2)))^(1/(n-2)), the positive solution
    of v'' + V v = 0.
    """
    r = geometry._radius(space, r, 'closed_form_v')
    n, m = space.n, space.m
    p = 2. * geometry._power(r, n - 2)
    return geometry._scalar(geometry._power(p / (m + p), 1. / (n - 2)))


def closed_form_v_derivatives(space, r):
    """
    Analytic (v', v'') of closed_form_v.
    """
    r = geometry._radius(space, r, 'closed_form_v_derivatives')
    n, m = space.n, space.m
    p = 2. * geometry._power(r, n - 2)
    base = p / (m + p)
    e = 1. / (n - 2)
    dv = m / (2. * geometry._power(r, n - 1)) * geometry._power(base, e + 1.)
    ddv = -(n - 1) * m / (2. * geometry._power(r, n)) * geometry._power(base, e + 2.)
    return geometry._scalar(dv), geometry._scalar(ddv)


def fc_candidate(space, r):
    """
    Positive Jacobi field psi = 2 r^((n-2)/2) / (m + 2 r^(n-2)) with
    psi'(R0) = 0.

    :return: (psi, dpsi_dr)
    """
    r = geometry._radius(space, r, 'fc_candidate')
    n, m = space.n, space.m
    p = 2. * geometry._power(r, n - 2)
    psi = 2. * geometry._power(r, (n - 2) / 2.) / (m + p)
    dpsi = (n - 2) * geometry._power(r, n / 2. - 2.) * (m - p) / (m + p) ** 2
    return geometry._scalar(psi), geometry._scalar(dpsi)


def supersolution_residual(space, lambda_k, r):
    """
    L_k u for u = r^(-(N-1)/2) v(r); nonpositive when the level has
    nonnegative stability margin.
    """
    r = geometry._radius(space, r, 'supersolution_residual')
    N = space.N
    a = (N - 1) / 2.
    v = np.asarray(closed_form_v(space, r))
    dv, ddv = (np.asarray(x) for x in closed_form_v_derivatives(space, r))
    u = r ** (-a) * v
    du = r ** (-a) * dv - a * r ** (-a - 1.) * v
    ddu = r ** (-a) * ddv - 2. * a * r ** (-a - 1.) * dv + a * (a + 1.) * r ** (-a - 2.) * v
    V = np.asarray(geometry.radial_potential(space, r))
    return geometry._scalar(ddu + (N - 1) / r * du + V * u - lambda_k / (r * r) * u)


def make_mode_problem(space, link, k, R, inner_bc=InnerBC.SCHWARZSCHILD_NEUMANN,
                      outer_bc=OuterBC.DIRICHLET, weight_kind=WeightKind.SCHWARZSCHILD,
                      spectrum=None):
    """
    Mode problem for the level k of the link's Jacobi spectrum.

    :param spectrum: (JacobiSpectrum) optional precomputed spectrum with at least k+1 levels.
    :return: (ModeProblem)
    """
    if not R > space.R0:
        raise DomainError('make_mode_problem', 'R must exceed R0', R=R, R0=space.R0)
    if link.ambient_n != space.n:
        raise DomainError('make_mode_problem', 'link and space dimensions differ',
                          n=space.n, ambient_n=link.ambient_n)
    if int(k) != k or k < 0:
        raise DomainError('make_mode_problem', 'unknown level', k=k)
    if spectrum is None or len(spectrum) <= k:
        spectrum = jacobi_spectrum(link, int(k) + 1)
    lam, mult = spectrum.level(int(k))
    return ModeProblem(space=space, mode_eigenvalue=lam, R=float(R), inner_bc=inner_bc,
                       outer_bc=outer_bc, weight_kind=weight_kind, k=int(k), multiplicity=mult)


def analytic_skip(problem):
    """
    True when the level cannot carry negative directions for Dirichlet
    outer data: lambda_k >= 0 and W_k < 0 on [R0, oo). Since r^2 V is
    maximal at R0 with value (n-1)/4, this holds when
    (4 lambda_k + (n-2)(n-4)) / 4 > (n-1)/4.
    """
    n = problem.space.n
    lam = problem.mode_eigenvalue
    return lam >= 0. and 4. * lam + (n - 2) * (n - 4) > n - 1


def _outer_steklov_coefficient(problem):
    # -(F'/F + kappa f)(R) R^(N-1), written in the log variable
    space, R = problem.space, problem.R
    dphi = geometry.isotropic_factor_log_derivative(space, R)
    return (1. + 0.5 * space.N * R * dphi) * R ** (space.n - 3)


def assemble_mode_matrices(problem, grid):
    """
    Tridiagonal stiffness and diagonal mass of the discretized form.

    Midpoint values of r^(n-3) weight the difference quotients, node
    values enter with trapezoid weights. Dirichlet ends are removed.

    :return: (diag, offdiag, mass) arrays
    """
    space = problem.space
    if not math.isclose(grid.nodes[0], space.R0, rel_tol=1e-12) or \
            not math.isclose(grid.nodes[-1], problem.R, rel_tol=1e-12):
        raise DomainError('assemble_mode_matrices', 'grid does not span the problem interval',
                          grid=(grid.nodes[0], grid.nodes[-1]), interval=problem.interval)
    n = space.n
    dt = grid.step
    t = grid.t
    r = grid.nodes
    r_mid = space.R0 * np.exp(0.5 * (t[1:] + t[:-1]))
    p_mid = r_mid ** (n - 3)
    q = (problem.mode_eigenvalue - r * r * np.asarray(geometry.radial_potential(space, r))) * r ** (n - 3)
    w = np.full(grid.size, dt)
    w[0] = w[-1] = 0.5 * dt

    diag = w * q
    diag[:-1] += p_mid / dt
    diag[1:] += p_mid / dt
    offdiag = -p_mid / dt

    if problem.weight_kind == WeightKind.SCHWARZSCHILD:
        rho = np.asarray(geometry.isotropic_factor(space, r)) ** 2
    else:
        rho = np.ones_like(r)
    mass = w * rho * r ** (n - 1)

    if problem.inner_bc == InnerBC.SCHWARZSCHILD_NEUMANN:
        diag[0] -= 0.5 * (n - 3) * space.R0 ** (n - 3)
    if problem.outer_bc == OuterBC.STEKLOV:
        diag[-1] -= _outer_steklov_coefficient(problem)

    lo = 1 if problem.inner_bc == InnerBC.DIRICHLET else 0
    hi = grid.size - 1 if problem.outer_bc == OuterBC.DIRICHLET else grid.size
    return diag[lo:hi].copy(), offdiag[lo:hi - 1].copy(), mass[lo:hi].copy()


def dump_mode_matrices(problem, grid, path):
    """
    Write the assembled matrices as CSV rows (index, diag, offdiag, mass).
    """
    diag, offdiag, mass = assemble_mode_matrices(problem, grid)
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['index', 'diag', 'offdiag', 'mass'])
        for i in range(len(diag)):
            writer.writerow([i, repr(float(diag[i])), repr(float(offdiag[i])) if i < len(offdiag) else '',
                             repr(float(mass[i]))])


def _zero_threshold(diag, mass, zero_tolerance):
    # local stiffness scale at the outer node, the scale of the low spectrum
    return zero_tolerance * abs(diag[-1]) / mass[-1]


def _counts(problem, grid, pivot_tolerance, zero_tolerance):
    diag, offdiag, mass = assemble_mode_matrices(problem, grid)
    negative, _ = ldl_inertia(diag, offdiag, pivot_tolerance)
    tau = _zero_threshold(diag, mass, zero_tolerance)
    nonpositive, _ = ldl_inertia(diag - tau * mass, offdiag, pivot_tolerance)
    return negative, nonpositive, (diag, offdiag, mass)


def smallest_eigenvalues(diag, offdiag, mass, count=4):
    """
    Lowest generalized eigenvalues of (K, M) with diagonal M.
    """
    s = 1. / np.sqrt(mass)
    d = diag * s * s
    e = offdiag * s[:-1] * s[1:]
    top = min(count, len(d)) - 1
    if len(d) == 1:
        return (float(d[0]),)
    return tuple(float(x) for x in eigvalsh_tridiagonal(d, e, select='i', select_range=(0, top)))


def count_negative(problem, grid, refine=True, pivot_tolerance=NULL_PIVOT_TOLERANCE,
                   zero_tolerance=ZERO_TOLERANCE):
    """
    Negative and nonpositive eigenvalue counts of the mode problem.

    The counts come from the inertia of the stiffness matrix (and of
    K - tau M for the nonpositive count), which by Sylvester's law equal
    the generalized counts. One doubled grid checks the counts.

    :param problem: (ModeProblem)
    :param grid: (RadialGrid) spanning [R0, R].
    :param refine: (bool) run the doubling check.
    :return: (ModeSpectrumResult)
    """
    try:
        negative, nonpositive, matrices = _counts(problem, grid, pivot_tolerance, zero_tolerance)
    except NumericError as e:
        raise NumericError('count_negative', 'inertia factorization breakdown', pivot_index=e.pivot_index,
                           k=problem.k, R=problem.R, inner=str(problem.inner_bc),
                           outer=str(problem.outer_bc), grid=grid.size) from e
    refined = False
    if refine:
        fine_negative, fine_nonpositive, _ = _counts(problem, grid.refined(), pivot_tolerance, zero_tolerance)
        refined = fine_negative == negative and fine_nonpositive == nonpositive
        if not refined:
            logger.warning('counts of level %d at R=%g changed under refinement: %d/%d -> %d/%d',
                           problem.k, problem.R, negative, nonpositive, fine_negative, fine_nonpositive)
    return ModeSpectrumResult(negative_count=negative, nonpositive_count=nonpositive,
                              smallest_eigenvalues=smallest_eigenvalues(*matrices),
                              grid_size=grid.size, refined=refined)


@dataclass(frozen=True)
class SteklovValue:
    """
    Outcome of steklov_value: the eigenvalue, or degenerate=True when the
    shooting solution vanishes on the outer sphere.
    """
    value: float
    degenerate: bool = False

    def contributes(self, tol=STEKLOV_TOLERANCE):
        return not self.degenerate and self.value < 1. - tol

    def is_null(self, tol=STEKLOV_TOLERANCE):
        return not self.degenerate and abs(self.value - 1.) <= tol


def _liouville_rhs(problem):
    # v = r^((n-2)/2) u satisfies v_tt = v_t - r^2 W_k v in t = log(r/R0)
    space, lam = problem.space, problem.mode_eigenvalue
    R0 = space.R0

    def rhs(t, y):
        r = R0 * math.exp(t)
        return np.array([y[1], y[1] - r * r * wk_potential(space, lam, r) * y[0]])
    return rhs


def kernel_solution(problem, method='DOP853', rtol=1e-11, atol=1e-13):
    """
    Solution of L_k u = 0 with the free horizon condition, in the
    Liouville variable v = r^((n-2)/2) u and t = log(r/R0).

    The horizon condition u_t + (n-3)/2 u = 0 becomes v_t = v/2.

    :return: scipy OdeResult with dense output, y = (v, v_t)
    """
    T = problem.log_length
    solution = integrate.solve_ivp(_liouville_rhs(problem), (0., T), [1., 0.5], method=method,
                                   rtol=rtol, atol=atol, dense_output=True)
    if not solution.success:
        raise NumericError('kernel_solution', solution.message, k=problem.k, R=problem.R)
    return solution


def steklov_from_log_derivative(problem, dlog_v):
    """
    Steklov eigenvalue from the outer value of v_t / v.

    With w = u / F the Schwarzschild picture function,
    lambda = (dw/dnu) / (kappa w) = (u_r/u - F'/F) / (f kappa) at R.
    """
    space, R = problem.space, problem.R
    n = space.n
    du_over_u = (dlog_v - (n - 2) / 2.) / R
    dlogF = 0.5 * (n - 3) * geometry.isotropic_factor_log_derivative(space, R)
    return (du_over_u - dlogF) / (geometry.isotropic_factor(space, R) * problem.steklov_weight)


def steklov_value(problem, degenerate_tolerance=1e-10):
    """
    Steklov eigenvalue of the mode on the outer sphere, with the free
    condition on the horizon.

    :param problem: (ModeProblem) outer_bc STEKLOV, inner_bc SCHWARZSCHILD_NEUMANN.
    :return: (SteklovValue)
    """
    if problem.outer_bc != OuterBC.STEKLOV or problem.inner_bc != InnerBC.SCHWARZSCHILD_NEUMANN:
        raise DomainError('steklov_value', 'needs a free horizon and a Steklov outer sphere',
                          inner=str(problem.inner_bc), outer=str(problem.outer_bc))
    if not problem.steklov_weight > 0.:
        raise DomainError('steklov_value', 'umbilicity must be positive', R=problem.R)
    solution = kernel_solution(problem)
    v, dv = solution.y[:, -1]
    scale = float(np.max(np.abs(solution.y[0])))
    if abs(v) <= degenerate_tolerance * scale:
        logger.warning('degenerate Steklov mode k=%d at R=%g', problem.k, problem.R)
        return SteklovValue(value=float('nan'), degenerate=True)
    return SteklovValue(value=float(steklov_from_log_derivative(problem, dv / v)))
