"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

import csv
import io
import json
import os
import tempfile
import unittest
from unittest import mock

from coneindex import cidx
from coneindex.control import run_controller
from coneindex.control.verify import Check
from coneindex.model.errors import NumericError


def _run(argv):
    with mock.patch('sys.stdout', new_callable=io.StringIO) as out, \
            mock.patch('sys.stderr', new_callable=io.StringIO) as err:
        status = cidx.main(argv)
    return status, out.getvalue(), err.getvalue()


class TestCommandLine(unittest.TestCase):
    def test_stability(self):
        status, out, _ = _run(['stability', '--n', '8,4', '--link', 'clifford:1'])
        self.assertEqual(status, run_controller.EXIT_OK)
        rows = list(csv.reader(io.StringIO(out)))
        self.assertEqual(rows[0], ['n', 'link', 'lambda_1', 'margin', 'infinite_index', 'verdict'])
        self.assertEqual(rows[1], ['4', 'clifford:1', '-2.0', '-8.0', 'True', 'InfiniteIndex'])
        self.assertEqual(rows[2], ['8', 'clifford:1', '-6.0', '0.0', 'False', 'Stable'])

    def test_spectrum_json(self):
        status, out, _ = _run(['spectrum', '--n', '4', '--link', 'equator', '--count', '3', '--format', 'json'])
        self.assertEqual(status, 0)
        document = json.loads(out)
        self.assertEqual(document['kind'], 'spectrum')
        self.assertEqual(document['provenance']['tool'], 'cidx')
        self.assertEqual(document['provenance']['config']['count'], 3)
        self.assertEqual([r['multiplicity'] for r in document['reports']], [1, 3, 5])

    def test_index_to_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'index.csv')
            status, _, _ = _run(['index', '--n', '5', '--R', '10', '--kmax', '2', '--grid', '200',
                                 '--workers', '1', '--out', path])
            self.assertEqual(status, 0)
            with open(path, newline='') as fh:
                rows = list(csv.DictReader(fh))
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]['ind_F'], '0')
        self.assertEqual(rows[0]['verdict'], 'Stable')
        self.assertAlmostEqual(float(rows[0]['R_over_R0']), 10., places=9)

    def test_configuration_errors(self):
        status, _, err = _run(['index', '--m', '-1'])
        self.assertEqual(status, run_controller.EXIT_CONFIG)
        self.assertIn('RUN/M', err)
        status, _, _ = _run(['index', '--config', '/nonexistent.cfg'])
        self.assertEqual(status, run_controller.EXIT_CONFIG)

    def test_domain_error(self):
        status, _, err = _run(['stability', '--n', '4', '--link', 'clifford:7'])
        self.assertEqual(status, run_controller.EXIT_CONFIG)
        self.assertIn('clifford', err)

    def test_unreadable_raw_link(self):
        with tempfile.TemporaryDirectory() as tmp:
            missing = os.path.join(tmp, 'missing.json')
            status, _, err = _run(['stability', '--n', '4', '--link', f'raw:{missing}'])
            self.assertEqual(status, run_controller.EXIT_CONFIG)
            self.assertIn('missing.json', err)
            broken = os.path.join(tmp, 'broken.json')
            with open(broken, 'w') as fh:
                fh.write('{not json')
            status, _, err = _run(['index', '--n', '4', '--R', '10', '--link', f'raw:{broken}'])
            self.assertEqual(status, run_controller.EXIT_CONFIG)
            self.assertIn('raw_link', err)

    def test_numeric_error(self):
        with mock.patch.object(run_controller.RunController, 'run',
                               side_effect=NumericError('ldl_inertia', 'pivot breakdown', pivot_index=3)):
            status, _, err = _run(['index'])
        self.assertEqual(status, run_controller.EXIT_NUMERIC)
        self.assertIn('pivot_index=3', err)

    def test_failed_identity(self):
        checks = [Check('kernel_identity', 1e-3, 1e-10)]
        with mock.patch('coneindex.control.verify.run_checks', return_value=(checks, None)):
            status, out, _ = _run(['verify', '--n', '4'])
        self.assertEqual(status, run_controller.EXIT_VERIFY_FAILED)
        self.assertIn('kernel_identity', out)

    def test_worker_cap(self):
        with mock.patch.dict(os.environ, {run_controller.THREADS_ENV: '2'}):
            self.assertEqual(run_controller.worker_count(8), 2)
        with mock.patch.dict(os.environ, {run_controller.THREADS_ENV: 'x'}):
            self.assertEqual(run_controller.worker_count(3), 3)


if __name__ == '__main__':
    unittest.main()
