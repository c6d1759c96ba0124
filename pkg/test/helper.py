# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Helper functions for cone index unit tests.
"""
import math

import numpy as np

from coneindex.model.schwarzschild_geometry import make_space
from coneindex.model.index_forms import SeparatedTestFunction

# grid used by tests that do not need the production resolution
TEST_GRID = 600


def space(n=4, m=2.):
    """
    Schwarzschild space, by default n=4, m=2 where R0 = 1 and s0 = 2.
    """
    return make_space(n, m)


def log_radius(space, turns):
    """
    R0 e^(2 pi turns), the radii where the closed form witnesses are tabulated.
    """
    return space.R0 * math.exp(2. * math.pi * turns)


def random_profile(space, R, k=0, seed=0, terms=4):
    """
    Sine series profile with decaying random coefficients, vanishing at both ends.
    """
    rng = np.random.default_rng(seed)
    coefficients = rng.standard_normal(terms) / np.arange(1, terms + 1) ** 2
    return SeparatedTestFunction.sine_series(space, R, k, coefficients)


def relative(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)
