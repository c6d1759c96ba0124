# -*- coding: utf-8 -*-

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Command line front end of the cone index tool.
"""

import os
import sys
import argparse
import logging
import faulthandler

# Limit numpy to a single thread
# Must run before numpy import
os.environ['MKL_NUM_THREADS'] = '1'
os.environ['NUMEXPR_NUM_THREADS'] = '1'
os.environ['OMP_NUM_THREADS'] = '1'

from .control.config import Command, ConfigError, load_config, resolve_run_config  # noqa: E402
from .control.run_controller import RunController, EXIT_CONFIG, EXIT_NUMERIC  # noqa: E402
from .model.errors import DomainError, NumericError  # noqa: E402


def version():
    try:
        from importlib.metadata import version as _version, PackageNotFoundError
        try:
            return _version('coneindex')
        except PackageNotFoundError:
            pass
    except ImportError:
        pass
    return '0+unknown'


def make_parser():
    parser = argparse.ArgumentParser(
        prog='cidx',
        description='Stability, Morse index and density of free boundary minimal cones '
                    'in Riemannian Schwarzschild space')

    parser.add_argument('command', type=Command, nargs='?', choices=list(Command),
                        help='Command to run. Defaults to COMMAND of the configuration')
    parser.add_argument('--config', type=str,
                        help='configuration file, INI or a flat JSON document (.json)')
    parser.add_argument('--n', type=str,
                        help='ambient dimensions, comma separated. e.g. 4,5,6')
    parser.add_argument('--m', type=float, help='mass of the Schwarzschild space')
    parser.add_argument('--link', type=str,
                        help='links, comma separated: equator, clifford:p or raw:path')
    parser.add_argument('--R', type=str,
                        help='outer radii as multiples of R0, comma separated. e.g. 10,100,1000')
    parser.add_argument('--kmax', type=int, help='number of distinct link levels per report')
    parser.add_argument('--grid', type=int, help='number of radial grid nodes')
    parser.add_argument('--count', type=int, help='link levels listed by the spectrum command')
    parser.add_argument('--rho', type=str,
                        help='density ladder, distances from the horizon in units of R0, comma separated')
    parser.add_argument('--out', type=str,
                        help='output file or directory, standard output when omitted')
    parser.add_argument('--format', type=str, choices=['csv', 'json'], help='report format')
    parser.add_argument('--workers', type=int,
                        help='worker threads. Capped by environment variable CONE_INDEX_THREADS')
    parser.add_argument('--dump-matrices', type=str, metavar='DIR',
                        help='write the assembled mode matrices of index runs as CSV into DIR')
    parser.add_argument(
        "--debug",
        action='store_true',
        help="Turn on debug messages. Can also turn this on by setting environment variable CIDX_LOG_LEVEL=DEBUG"
    )
    return parser


def main(argv=None):
    """
    :return: (int) exit status, 0 on success, 1 when verify finds a failing
        identity, 2 on configuration errors, 3 on numeric errors.
    """
    parser = make_parser()
    args = parser.parse_args(argv)

    # Dump backtrace to stderr on SEGFAULT
    faulthandler.enable()

    level = logging.CRITICAL

    if os.getenv('CIDX_LOG_LEVEL'):
        level = os.getenv('CIDX_LOG_LEVEL').upper()

    if args.debug:
        level = logging.DEBUG

    logging.basicConfig(
        stream=sys.stdout,
        level=level,
        format="%(asctime)s %(levelname)-6s %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        cfg = load_config(args.config)
        config = resolve_run_config(cfg, args)
    except (ConfigError, RuntimeError) as e:
        print(f'cidx: configuration error: {e}', file=sys.stderr)
        return EXIT_CONFIG

    try:
        return RunController(config, version=version()).run()
    except DomainError as e:
        print(f'cidx: {e}', file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as e:
        print(f'cidx: numeric failure: {e}', file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
