"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

from .errors import DomainError, NumericError
from .schwarzschild_geometry import SchwarzschildSpace, ArealProfile, make_space, areal_profile
from .sphere_link_catalog import (MinimalLink, JacobiSpectrum, LinkKind, StabilityVerdict, equator, clifford,
                                  raw_link, parse_link_spec, jacobi_spectrum, stability_margin, stability_verdict)
from .radial_spectral import (ModeProblem, RadialGrid, ModeSpectrumResult, InnerBC, OuterBC, WeightKind,
                              make_mode_problem, make_grid, count_negative, steklov_value)
from .index_forms import (SeparatedTestFunction, BoundaryClass, IndexReport, DivergenceVerdict, index_report,
                          index_sweep, witness_value)
from .density import DensityReport, density_report

__all__ = [
    'DomainError', 'NumericError',
    'SchwarzschildSpace', 'ArealProfile', 'make_space', 'areal_profile',
    'MinimalLink', 'JacobiSpectrum', 'LinkKind', 'StabilityVerdict', 'equator', 'clifford', 'raw_link',
    'parse_link_spec', 'jacobi_spectrum', 'stability_margin', 'stability_verdict',
    'ModeProblem', 'RadialGrid', 'ModeSpectrumResult', 'InnerBC', 'OuterBC', 'WeightKind',
    'make_mode_problem', 'make_grid', 'count_negative', 'steklov_value',
    'SeparatedTestFunction', 'BoundaryClass', 'IndexReport', 'DivergenceVerdict', 'index_report',
    'index_sweep', 'witness_value',
    'DensityReport', 'density_report',
]
