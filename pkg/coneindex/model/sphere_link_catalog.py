# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Catalog of closed minimal hypersurfaces of the unit sphere S^(n-1) used
as cone links: totally geodesic equators, Clifford tori and user supplied
(raw) links.

The Jacobi operator on a link is taken as J f = -Delta f - |A|^2 f, so the
constant function is an eigenfunction with eigenvalue -|A|^2.
"""

import enum
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

from .errors import DomainError

logger = logging.getLogger(__name__)

# relative tolerance used when merging eigenvalue levels
LEVEL_RTOL = 1e-9


class LinkKind(enum.Enum):
    EQUATOR = "equator"
    CLIFFORD = "clifford"
    RAW = "raw"

    def __str__(self):
        return self.value


class StabilityVerdict(enum.Enum):
    STABLE = "Stable"
    INFINITE_INDEX = "InfiniteIndex"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MinimalLink:
    """
    Minimal hypersurface of S^(n-1), the link of a cone in R^n.

    For Clifford links p and q are the sphere dimensions; raw links carry
    their eigenvalue levels as ((value, multiplicity), ...).
    """
    ambient_n: int
    kind: LinkKind
    volume: float
    shape_norm_sq: float
    label: str
    p: int = 0
    q: int = 0
    levels: tuple = ()
    assumptions: tuple = ()

    @property
    def dimension(self):
        return self.ambient_n - 2

    @property
    def radii(self):
        if self.kind != LinkKind.CLIFFORD:
            return None
        d = self.ambient_n - 2
        return math.sqrt(self.p / d), math.sqrt(self.q / d)


@dataclass(frozen=True)
class JacobiSpectrum:
    """
    Lowest distinct eigenvalue levels of J on a link.
    """
    eigenvalues: tuple
    multiplicities: tuple
    count: int
    source_link: MinimalLink = field(repr=False)

    def __len__(self):
        return len(self.eigenvalues)

    def level(self, k):
        if not 0 <= k < len(self.eigenvalues):
            raise DomainError('jacobi_spectrum', 'unknown level', k=k, levels=len(self.eigenvalues))
        return self.eigenvalues[k], self.multiplicities[k]


def sphere_volume(k):
    """
    Volume of the unit k-sphere, omega_k = 2 pi omega_(k-2) / (k-1).

    :param k: (int) k >= 0
    :return: (float)
    """
    if int(k) != k or k < 0:
        raise DomainError('sphere_volume', 'dimension must be a nonnegative integer', k=k)
    omega = {0: 2., 1: 2. * math.pi}
    for j in range(2, int(k) + 1):
        omega[j] = 2. * math.pi * omega[j - 2] / (j - 1)
    return omega[int(k)]


def harmonic_multiplicity(d, l):
    """
    Dimension of the degree l spherical harmonics on S^d.
    """
    if l < 0:
        return 0
    if d == 1:
        return 1 if l == 0 else 2
    return int(comb(l + d, d, exact=True) - comb(l + d - 2, d, exact=True))


def sphere_eigenvalue(d, l, radius_sq=1.):
    """
    Eigenvalue l(l+d-1)/radius^2 of -Delta on the d-sphere of given radius.
    """
    return l * (l + d - 1) / radius_sq


def equator(n):
    """
    Totally geodesic S^(n-2) in S^(n-1).
    """
    if int(n) != n or n < 3:
        raise DomainError('equator', 'dimension must be an integer >= 3', n=n)
    n = int(n)
    return MinimalLink(ambient_n=n, kind=LinkKind.EQUATOR, volume=sphere_volume(n - 2),
                       shape_norm_sq=0., label='equator')


def clifford(n, p):
    """
    Clifford torus S^p(sqrt(p/(n-2))) x S^q(sqrt(q/(n-2))), p + q = n - 2.
    """
    if int(n) != n or n < 4:
        raise DomainError('clifford', 'dimension must be an integer >= 4', n=n)
    if int(p) != p or not 1 <= p <= n - 3:
        raise DomainError('clifford', 'sphere dimension out of range', n=n, p=p)
    n, p = int(n), int(p)
    q = n - 2 - p
    d = n - 2
    volume = sphere_volume(p) * (p / d) ** (p / 2.) * sphere_volume(q) * (q / d) ** (q / 2.)
    return MinimalLink(ambient_n=n, kind=LinkKind.CLIFFORD, volume=volume,
                       shape_norm_sq=float(d), label=f'clifford:{p}', p=p, q=q)


def raw_link(record, label=None):
    """
    Link from the ingestion record
    {ambient_n, volume, shape_norm_sq, eigenvalues: [[value, multiplicity], ...]}.

    The data is trusted; inconsistencies are logged and kept as
    assumptions on the link.

    :param record: (dict or str) record or path to a JSON file holding it.
    :param label: (str) optional label, defaults to raw:<path> or 'raw'.
    :return: (MinimalLink)
    """
    if isinstance(record, str):
        path = record
        try:
            with open(path, 'r') as fh:
                record = json.load(fh)
        except (OSError, ValueError) as e:
            raise DomainError('raw_link', f'cannot read link record: {e}', path=path) from e
        label = label or f'raw:{path}'
    try:
        n = int(record['ambient_n'])
        volume = float(record['volume'])
        shape_norm_sq = float(record['shape_norm_sq'])
        levels = tuple((float(v), int(mult)) for v, mult in record['eigenvalues'])
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError('raw_link', f'malformed link record: {e}') from e
    if n < 3 or volume <= 0. or shape_norm_sq < 0. or not levels:
        raise DomainError('raw_link', 'invalid link record', ambient_n=n, volume=volume,
                          shape_norm_sq=shape_norm_sq, levels=len(levels))
    if any(mult < 1 for _, mult in levels):
        raise DomainError('raw_link', 'multiplicities must be positive')

    assumptions = ['link minimality not verified']
    values = [v for v, _ in levels]
    if values != sorted(values):
        logger.warning('raw link eigenvalues are not sorted, sorting them')
        levels = tuple(sorted(levels))
    if not math.isclose(levels[0][0], -shape_norm_sq, rel_tol=LEVEL_RTOL, abs_tol=1e-12):
        logger.warning('raw link first eigenvalue %g differs from -|A|^2 = %g', levels[0][0], -shape_norm_sq)
        assumptions.append('first eigenvalue differs from -|A|^2')
    if shape_norm_sq > 0.:
        assumptions.append('lambda_1 <= -(n-2) not verified')
    return MinimalLink(ambient_n=n, kind=LinkKind.RAW, volume=volume, shape_norm_sq=shape_norm_sq,
                       label=label or 'raw', levels=levels, assumptions=tuple(assumptions))


def parse_link_spec(n, spec):
    """
    Link from a command line specification: equator, clifford:p or raw:path.
    """
    spec = spec.strip()
    kind, _, arg = spec.partition(':')
    kind = kind.lower()
    if kind == 'equator' and not arg:
        return equator(n)
    if kind == 'clifford':
        try:
            p = int(arg)
        except ValueError as e:
            raise DomainError('parse_link_spec', 'clifford needs an integer p', spec=spec) from e
        return clifford(n, p)
    if kind == 'raw' and arg:
        link = raw_link(arg)
        if link.ambient_n != n:
            raise DomainError('parse_link_spec', 'raw link dimension does not match', spec=spec,
                              n=n, ambient_n=link.ambient_n)
        return link
    raise DomainError('parse_link_spec', 'unknown link specification', spec=spec)


def _merge_levels(pairs):
    """
    Sort (value, multiplicity) pairs and merge equal values.
    """
    merged = []
    for value, mult in sorted(pairs):
        if merged and math.isclose(value, merged[-1][0], rel_tol=LEVEL_RTOL, abs_tol=1e-12):
            merged[-1][1] += mult
        else:
            merged.append([value, mult])
    return merged


def product_levels(n, p, q, count, box=None):
    """
    Lowest `count` distinct eigenvalues of -Delta on S^p(r1) x S^q(r2)
    shifted by -(n-2).

    Each lattice sum is increasing in a and in b, so once the values at
    (A+1, 0) and (0, B+1) exceed the largest retained level nothing
    outside the box can enter the list. `box` sets the initial lattice
    cutoff, the default grows from max(count, 2).
    """
    d = n - 2
    r1_sq, r2_sq = p / d, q / d

    def value(a, b):
        return sphere_eigenvalue(p, a, r1_sq) + sphere_eigenvalue(q, b, r2_sq) - d

    A = B = box or max(count, 2)
    while True:
        pairs = [(value(a, b), harmonic_multiplicity(p, a) * harmonic_multiplicity(q, b))
                 for a in range(A + 1) for b in range(B + 1)]
        merged = _merge_levels(pairs)[:count]
        largest = merged[-1][0]
        if len(merged) == count and value(A + 1, 0) > largest and value(0, B + 1) > largest:
            return merged
        A *= 2
        B *= 2


def jacobi_spectrum(link, count):
    """
    Lowest `count` distinct levels of the Jacobi operator of a link.

    :param link: (MinimalLink)
    :param count: (int) number of distinct levels, count >= 1.
    :return: (JacobiSpectrum)
    """
    if int(count) != count or count < 1:
        raise DomainError('jacobi_spectrum', 'count must be a positive integer', count=count)
    count = int(count)
    n = link.ambient_n
    if link.kind == LinkKind.EQUATOR:
        d = n - 2
        levels = [(sphere_eigenvalue(d, l), harmonic_multiplicity(d, l)) for l in range(count)]
    elif link.kind == LinkKind.CLIFFORD:
        levels = product_levels(n, link.p, link.q, count)
    else:
        levels = list(link.levels[:count])
        if len(levels) < count:
            logger.warning('raw link %s supplies %d levels, %d requested', link.label, len(levels), count)
    return JacobiSpectrum(eigenvalues=tuple(float(v) for v, _ in levels),
                          multiplicities=tuple(int(k) for _, k in levels),
                          count=len(levels), source_link=link)


def first_eigenvalue(link):
    return jacobi_spectrum(link, 1).eigenvalues[0]


def stability_margin(link):
    """
    4 lambda_1 + (n-2)(n-4); a nonnegative margin makes the cone stable.
    """
    n = link.ambient_n
    return 4. * first_eigenvalue(link) + (n - 2) * (n - 4)


def infinite_index_criterion(link):
    """
    True when lambda_1 + ((n-3)/2)^2 < 0, the regime where the
    explicit Dirichlet test functions become negative for large R.
    """
    n = link.ambient_n
    return first_eigenvalue(link) + ((n - 3) / 2.) ** 2 < 0.


def stability_verdict(link):
    if stability_margin(link) >= 0.:
        return StabilityVerdict.STABLE
    if infinite_index_criterion(link):
        return StabilityVerdict.INFINITE_INDEX
    return StabilityVerdict.INCONCLUSIVE
