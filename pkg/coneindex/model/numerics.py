"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Small numerical kernels shared by the model modules: fourth order
Runge-Kutta stepping, adaptive Simpson quadrature and the inertia of a
symmetric tridiagonal matrix.
"""

import logging
import numpy as np

from .errors import NumericError

logger = logging.getLogger(__name__)

# Evaluation cap of the adaptive Simpson rule
MAX_EVALUATIONS = 2 ** 20
NULL_PIVOT_TOLERANCE = 1e-14


def rk4_step(f, t, y, h):
    """
    Single classical Runge-Kutta step.

    :param f: (callable) right hand side f(t, y) returning an array like y.
    :param t: (float) current value of the independent variable.
    :param y: (ndarray) current state.
    :param h: (float) step size.
    :return: (ndarray) state at t + h.
    """
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + h * (k1 + 2. * (k2 + k3) + k4) / 6.


def rk4_integrate(f, nodes, y0):
    """
    Step y' = f(t, y) across the given (possibly non uniform) nodes.

    :param f: (callable) right hand side f(t, y).
    :param nodes: (array) increasing values of the independent variable, nodes[0] is the start.
    :param y0: (array) state at nodes[0].
    :return: (ndarray) states, one row per node.
    """
    nodes = np.asarray(nodes, dtype=float)
    ys = np.empty((len(nodes), len(y0)))
    ys[0] = y0
    for i in range(len(nodes) - 1):
        ys[i + 1] = rk4_step(f, nodes[i], ys[i], nodes[i + 1] - nodes[i])
    return ys


def integrate_adaptive_simpson(f, a, b, tol=1e-10, max_evaluations=MAX_EVALUATIONS, max_depth=50):
    """
    Adaptive Simpson's rule with Richardson correction.

    The interval stack is processed iteratively so deep refinements do not
    hit the interpreter recursion limit.

    :param f: (callable) scalar integrand.
    :param a: (float) lower bound.
    :param b: (float) upper bound.
    :param tol: (float) absolute error tolerance.
    :param max_evaluations: (int) hard cap on integrand evaluations.
    :param max_depth: (int) maximum bisection depth of a single interval.
    :return: (float, float) integral value and error estimate.
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, error = integrate_adaptive_simpson(f, b, a, tol, max_evaluations, max_depth)
        return -value, error

    def simpson(fa, fm, fb, h):
        return h / 3.0 * (fa + 4.0 * fm + fb)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    evaluations = 3
    stack = [(a, b, fa, fm, fb, simpson(fa, fm, fb, 0.5 * (b - a)), tol, 0)]
    total = 0.0
    error = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, whole, local_tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        flm = f(0.5 * (lo + mid))
        frm = f(0.5 * (mid + hi))
        evaluations += 2
        if evaluations > max_evaluations:
            raise NumericError('integrate_adaptive_simpson', 'evaluation cap exceeded',
                               a=a, b=b, tol=tol, evaluations=evaluations)
        left = simpson(flo, flm, fmid, 0.5 * h)
        right = simpson(fmid, frm, fhi, 0.5 * h)
        estimate = (left + right - whole) / 15.0
        # roundoff floor
        floor = 64 * np.finfo(float).eps * abs(left + right)
        if abs(estimate) <= max(local_tol, floor) or depth >= max_depth:
            if depth >= max_depth:
                logger.debug('adaptive simpson reached depth %d on [%g, %g]', depth, lo, hi)
            total += left + right + estimate
            error += abs(estimate)
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * local_tol, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * local_tol, depth + 1))
    return total, error


def ldl_inertia(diag, offdiag, pivot_tolerance=NULL_PIVOT_TOLERANCE):
    """
    Inertia of a symmetric tridiagonal matrix from its LDL^T factorization.

    By Sylvester's law of inertia the number of negative pivots equals
    the number of negative eigenvalues. The matrix is Jacobi scaled first
    so the pivot tolerance is relative to a unit diagonal.

    :param diag: (array) main diagonal, length n.
    :param offdiag: (array) first off diagonal, length n - 1.
    :param pivot_tolerance: (float) smallest admissible |pivot| of the scaled matrix.
    :return: (int, ndarray) count of negative pivots and the pivots.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    scale = np.sqrt(np.abs(diag))
    scale[scale == 0.] = 1.
    a = (diag / (scale * scale)).tolist()
    b = (offdiag / (scale[:-1] * scale[1:])).tolist()

    pivots = [0.] * len(a)
    d = a[0]
    for i in range(len(a)):
        if i > 0:
            d = a[i] - b[i - 1] * b[i - 1] / d
        if abs(d) < pivot_tolerance:
            raise NumericError('ldl_inertia', 'pivot breakdown', pivot_index=i, pivot=d)
        pivots[i] = d
    pivots = np.array(pivots)
    return int(np.count_nonzero(pivots < 0.)), pivots
