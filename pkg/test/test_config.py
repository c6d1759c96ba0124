"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

import argparse
import io
import json
import os
import tempfile
import unittest
from configparser import ConfigParser

from coneindex.control.config import (Command, Run, Tolerance, ConfigError, Parser, load_config,
                                      resolve_run_config)


def _parse(raw):
    parser = ConfigParser()
    parser.optionxform = str.upper
    parser.read_string(raw)
    return parser


class TestParser(unittest.TestCase):
    def test_typed_values(self):
        cfg = _parse("""
[DEFAULT]
COMMAND = density

[RUN]
N = 4, 5,6
M = 1.5
LINK = equator,clifford:1
R = 10,100
FORMAT = JSON

[TOLERANCE]
ZERO_TOL = 1e-9
""")
        parser = Parser(cfg, strict=True)
        self.assertEqual(parser.get_command(), Command.DENSITY)
        self.assertEqual(parser.get(Run.N), [4, 5, 6])
        self.assertEqual(parser.get(Run.M), 1.5)
        self.assertEqual(parser.get(Run.LINK), ['equator', 'clifford:1'])
        self.assertEqual(parser.get(Run.R), [10., 100.])
        self.assertEqual(parser.get(Run.FORMAT), 'json')
        self.assertEqual(parser.get(Tolerance.ZERO), 1e-9)
        self.assertEqual(parser.get(Tolerance.STEKLOV, 1e-6), 1e-6)
        self.assertEqual(parser.get(Run.K_MAX, 12), 12)

    def test_tolerance_in_run_section(self):
        cfg = _parse("""
[RUN]
QUAD_TOL = 1e-12
""")
        self.assertEqual(Parser(cfg).get(Tolerance.QUADRATURE), 1e-12)

    def test_lenient_and_strict(self):
        cfg = _parse("""
[RUN]
GRID = many
""")
        self.assertEqual(Parser(cfg).get(Run.GRID, 2000), 2000)
        with self.assertRaises(ConfigError) as cm:
            Parser(cfg, strict=True).get(Run.GRID, 2000)
        self.assertEqual(cm.exception.field, 'RUN/GRID')

    def test_unknown_keys(self):
        cfg = _parse("""
[RUN]
N = 4
COLOUR = red
""")
        with self.assertRaises(ConfigError) as cm:
            Parser(cfg).check_unknown()
        self.assertEqual(cm.exception.field, 'RUN/COLOUR')

    def test_unknown_command(self):
        cfg = _parse("""
[DEFAULT]
COMMAND = plot
""")
        with self.assertRaises(ConfigError):
            Parser(cfg).get_command()


class TestResolve(unittest.TestCase):
    def test_packaged_defaults(self):
        config = resolve_run_config(load_config())
        self.assertEqual(config.command, Command.INDEX)
        self.assertEqual(config.n_list, (4,))
        self.assertEqual(config.m, 2.)
        self.assertEqual(config.link_specs, ('equator',))
        self.assertEqual(config.R_ladder, (10., 100., 1000.))
        self.assertEqual(config.k_max, 12)
        self.assertEqual(config.grid_size, 2000)
        self.assertEqual(config.format, 'csv')
        self.assertEqual(config.steklov_tol, 1e-6)
        self.assertEqual(config.zero_tol, 1e-8)
        self.assertEqual(config.pivot_tol, 1e-14)
        self.assertIsNone(config.output)
        self.assertIsNone(config.workers)

    def test_flags_win(self):
        args = argparse.Namespace(command=Command.STABILITY, n='8,9', m=None, link='clifford:3', R='100,10',
                                  kmax=4, grid=None, format='json', workers=2)
        config = resolve_run_config(load_config(), args)
        self.assertEqual(config.command, Command.STABILITY)
        self.assertEqual(config.n_list, (8, 9))
        self.assertEqual(config.m, 2.)
        self.assertEqual(config.link_specs, ('clifford:3',))
        self.assertEqual(config.R_ladder, (10., 100.))
        self.assertEqual(config.k_max, 4)
        self.assertEqual(config.format, 'json')
        self.assertEqual(config.workers, 2)

    def test_validation(self):
        for field, args in (('RUN/M', argparse.Namespace(m=0.)),
                            ('RUN/N', argparse.Namespace(n='2')),
                            ('RUN/LINK', argparse.Namespace(link='torus')),
                            ('RUN/R', argparse.Namespace(R='0.5')),
                            ('RUN/GRID', argparse.Namespace(grid=8)),
                            ('RUN/K_MAX', argparse.Namespace(kmax=0)),
                            ('RUN/RHO', argparse.Namespace(rho='100,10'))):
            with self.assertRaises(ConfigError) as cm:
                resolve_run_config(load_config(), args)
            self.assertEqual(cm.exception.field, field)
        with self.assertRaises(ConfigError):
            resolve_run_config(load_config(), argparse.Namespace(n='four'))

    def test_bad_tolerance(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'bad.cfg')
            with open(path, 'w') as fh:
                fh.write('[TOLERANCE]\nZERO_TOL = -1\n')
            with self.assertRaises(ConfigError) as cm:
                resolve_run_config(load_config(path))
        self.assertEqual(cm.exception.field, 'TOLERANCE/ZERO_TOL')

    def test_json_document(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'run.json')
            with open(path, 'w') as fh:
                json.dump({'command': 'spectrum', 'n': [5, 6], 'link': 'clifford:1', 'kmax': 3, 'count': 4,
                           'zero_tol': 1e-7}, fh)
            config = resolve_run_config(load_config(path))
        self.assertEqual(config.command, Command.SPECTRUM)
        self.assertEqual(config.n_list, (5, 6))
        self.assertEqual(config.k_max, 3)
        self.assertEqual(config.count, 4)
        self.assertEqual(config.zero_tol, 1e-7)

    def test_json_unknown_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'run.json')
            with open(path, 'w') as fh:
                json.dump({'n': 4, 'colour': 'red'}, fh)
            with self.assertRaises(ConfigError):
                load_config(path)

    def test_missing_file(self):
        with self.assertRaises(RuntimeError):
            load_config('/nonexistent/cidx.cfg')

    def test_serializer_reproduces_config(self):
        args = argparse.Namespace(command=Command.DENSITY, n='4,5', link='equator,clifford:1', rho='5,50')
        config = resolve_run_config(load_config(), args)
        buf = io.StringIO()
        config.serializer().write(buf)
        cfg = ConfigParser()
        cfg.optionxform = str.upper
        cfg.read_string(buf.getvalue())
        self.assertEqual(resolve_run_config(cfg), config)
        self.assertEqual(config.to_dict()['command'], 'density')


if __name__ == '__main__':
    unittest.main()
