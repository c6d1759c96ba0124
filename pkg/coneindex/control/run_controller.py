"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Runs the cidx commands over the table cells of a RunConfig.
"""

import logging
import os
import platform
import sys
from concurrent.futures import ThreadPoolExecutor

import psutil

from ..model.errors import DomainError, NumericError
from ..model.schwarzschild_geometry import make_space, areal_profile
from ..model.sphere_link_catalog import (parse_link_spec, jacobi_spectrum, stability_margin,
                                         infinite_index_criterion, stability_verdict)
from ..model.index_forms import index_report, apply_sweep_ladder, IndexReport
from ..model.density import density_report, DensityReport
from ..view.report_writer import ReportTable, write_report
from .config import Command
from . import verify

logger = logging.getLogger(__name__)

THREADS_ENV = 'CONE_INDEX_THREADS'

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _row_order(row):
    # n, link label, R ascending
    return row[0], row[2], row[3]


def worker_count(requested=None):
    """
    Pool size: the requested count, or the physical CPU count, capped by
    CONE_INDEX_THREADS.
    """
    count = requested or psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    cap = os.getenv(THREADS_ENV)
    if cap:
        try:
            count = min(count, max(int(cap), 1))
        except ValueError:
            logger.error('Ignoring %s=%s, not an integer', THREADS_ENV, cap)
    return count


class RunController:
    """
    Executes one RunConfig and writes its report.

    :param config: (RunConfig) resolved configuration.
    :param version: (str) tool version recorded in the provenance.
    :param stream: output stream used when no output path is configured.
    """

    def __init__(self, config, version='unknown', stream=None):
        self.config = config
        self.version = version
        self.stream = stream if stream is not None else sys.stdout
        self.failed_checks = []
        self._proc = psutil.Process()

    def provenance(self):
        return {
            'tool': 'cidx',
            'version': self.version,
            'config': self.config.to_dict(),
            'host': {'platform': platform.platform(), 'cpu_count': psutil.cpu_count(),
                     'workers': worker_count(self.config.workers)},
        }

    def run(self):
        """
        :return: (int) exit status.
        """
        handler = {
            Command.SPECTRUM: self.spectrum,
            Command.INDEX: self.index,
            Command.STABILITY: self.stability,
            Command.DENSITY: self.density,
            Command.VERIFY: self.verify,
        }[self.config.command]
        table = handler()
        write_report(table, self.config.format, self.config.output, self.provenance(), self.stream)
        logger.debug('%s done, rss=%d MiB', self.config.command, self._proc.memory_info().rss >> 20)
        if self.failed_checks:
            logger.error('%d identities failed: %s', len(self.failed_checks),
                         ', '.join(f'n={n} {name}' for n, name in self.failed_checks))
            return EXIT_VERIFY_FAILED
        return EXIT_OK

    def _links(self, n):
        return [parse_link_spec(n, spec) for spec in self.config.link_specs]

    def _map(self, fn, cells):
        """
        Evaluate fn over cells in the worker pool; errors are re-raised
        with the cell as provenance.
        """
        with ThreadPoolExecutor(max_workers=worker_count(self.config.workers)) as pool:
            futures = [(cell, pool.submit(fn, *cell)) for cell in cells]
            results = []
            for cell, future in futures:
                try:
                    results.append(future.result())
                except NumericError as e:
                    raise NumericError('run', str(e), pivot_index=e.pivot_index, cell=_describe(cell)) from e
                except DomainError as e:
                    raise DomainError('run', str(e), cell=_describe(cell)) from e
        return results

    def spectrum(self):
        table = ReportTable('spectrum', ('n', 'link', 'k', 'eigenvalue', 'multiplicity'),
                            sort_key=lambda row: (row[0], row[1], row[2]))
        for n in self.config.n_list:
            for link in self._links(n):
                spectrum = jacobi_spectrum(link, self.config.count)
                for k, (value, mult) in enumerate(zip(spectrum.eigenvalues, spectrum.multiplicities)):
                    table.add((n, link.label, k, value, mult))
        return table

    def stability(self):
        table = ReportTable('stability', ('n', 'link', 'lambda_1', 'margin', 'infinite_index', 'verdict'),
                            sort_key=lambda row: (row[0], row[1]))
        for n in self.config.n_list:
            for link in self._links(n):
                margin = stability_margin(link)
                lam = jacobi_spectrum(link, 1).eigenvalues[0]
                table.add((n, link.label, lam, margin, infinite_index_criterion(link), str(stability_verdict(link))),
                          {'n': n, 'link': link.label, 'lambda_1': lam, 'margin': margin,
                           'infinite_index': infinite_index_criterion(link),
                           'verdict': str(stability_verdict(link)), 'assumptions': list(link.assumptions)})
        return table

    def _index_cell(self, n, spec, R_multiple, sweep):
        space = make_space(n, self.config.m)
        link = parse_link_spec(n, spec)
        dump_dir = self.config.dump_matrices
        if dump_dir:
            os.makedirs(dump_dir, exist_ok=True)
        return index_report(space, link, R_multiple * space.R0, k_max=self.config.k_max,
                            grid_size=self.config.grid_size, ladder=() if sweep else None,
                            steklov_tol=self.config.steklov_tol, zero_tolerance=self.config.zero_tol,
                            pivot_tolerance=self.config.pivot_tol, dump_dir=dump_dir)

    def index(self):
        sweep = len(self.config.R_ladder) >= 3
        cells = [(n, spec, R, sweep) for n in self.config.n_list for spec in self.config.link_specs
                 for R in self.config.R_ladder]
        reports = self._map(self._index_cell, cells)
        if sweep:
            groups = {}
            for report in reports:
                groups.setdefault((report.space.n, report.link_label), []).append(report)
            reports = [r for group in groups.values() for r in apply_sweep_ladder(group)]
        table = ReportTable('index', IndexReport.CSV_COLUMNS, sort_key=_row_order)
        for report in reports:
            table.add(report.csv_row(), report.to_dict())
        return table

    def _density_cell(self, n):
        space = make_space(n, self.config.m)
        reference = parse_link_spec(n, self.config.reference)
        profile = areal_profile(space, r_max=max(self.config.rho_ladder) * space.R0, tol=self.config.profile_tol)
        return [density_report(space, link, reference, profile=profile, rho_ladder=self.config.rho_ladder,
                               tol=self.config.quad_tol) for link in self._links(n)]

    def density(self):
        table = ReportTable('density', DensityReport.CSV_COLUMNS, sort_key=lambda row: (row[0], row[2]))
        for reports in self._map(self._density_cell, [(n,) for n in self.config.n_list]):
            for report in reports:
                table.add(report.csv_row(), report.to_dict())
        return table

    def _verify_cell(self, n):
        space = make_space(n, self.config.m)
        return space, verify.run_checks(space, quad_tol=self.config.quad_tol, profile_tol=self.config.profile_tol)

    def verify(self):
        table = ReportTable('verify', verify.Check.CSV_COLUMNS, sort_key=lambda row: (row[0], row[2]))
        out = self.config.output
        for space, (checks, profile) in self._map(self._verify_cell, [(n,) for n in self.config.n_list]):
            for check in checks:
                table.add((space.n, space.m, check.name, check.value, check.tolerance, check.passed))
                if not check.passed:
                    self.failed_checks.append((space.n, check.name))
            if out and os.path.isdir(out):
                profile.to_csv(os.path.join(out, f'areal_profile_n{space.n}.csv'))
        return table


def _describe(cell):
    return ','.join(str(c) for c in cell[:3])
