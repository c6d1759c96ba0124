"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Configuration schema of cidx runs.

Settings live in an INI document with the sections RUN and TOLERANCE.
A flat JSON document is accepted as well and lands in RUN; tolerance keys
are therefore looked up in both sections.
"""

from collections import namedtuple
from configparser import ConfigParser
from dataclasses import dataclass, asdict
from enum import Enum, auto
import json
import logging
import os
import re


class Command(Enum):
    SPECTRUM = "spectrum"
    INDEX = "index"
    STABILITY = "stability"
    DENSITY = "density"
    VERIFY = "verify"

    def __str__(self):
        return self.value


class Run(Enum):
    N = auto()
    M = auto()
    LINK = auto()
    REFERENCE = auto()
    R = auto()
    K_MAX = auto()
    GRID = auto()
    OUT = auto()
    FORMAT = auto()
    COUNT = auto()
    RHO = auto()
    WORKERS = auto()
    DUMP_MATRICES = auto()


class Tolerance(Enum):
    STEKLOV = auto()
    ZERO = auto()
    PIVOT = auto()
    QUADRATURE = auto()
    PROFILE = auto()


class ConfigError(ValueError):
    """
    Unknown key, unparsable value or value outside the domain of the
    operation it feeds. `field` names the offending section/option.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f'{field}: {message}')


Field = namedtuple('Field', ['loc', 'type', 'item'], defaults=[str])
MultiLoc = namedtuple('MultiLoc', ['sections', 'write_section', 'field'])

_schema = {
    Run.N: Field(loc=('RUN', 'N'), type=list, item=int),
    Run.M: Field(loc=('RUN', 'M'), type=float),
    Run.LINK: Field(loc=('RUN', 'LINK'), type=list),
    Run.REFERENCE: Field(loc=('RUN', 'REFERENCE'), type=str),
    Run.R: Field(loc=('RUN', 'R'), type=list, item=float),
    Run.K_MAX: Field(loc=('RUN', 'K_MAX'), type=int),
    Run.GRID: Field(loc=('RUN', 'GRID'), type=int),
    Run.OUT: Field(loc=('RUN', 'OUT'), type=str),
    Run.FORMAT: Field(loc=('RUN', 'FORMAT'), type=['csv', 'json']),
    Run.COUNT: Field(loc=('RUN', 'SPECTRUM_COUNT'), type=int),
    Run.RHO: Field(loc=('RUN', 'RHO'), type=list, item=float),
    Run.WORKERS: Field(loc=('RUN', 'WORKERS'), type=int),
    Run.DUMP_MATRICES: Field(loc=('RUN', 'DUMP_MATRICES'), type=str),
    Tolerance.STEKLOV: Field(loc=MultiLoc(['RUN', 'TOLERANCE'], 'TOLERANCE', 'STEKLOV_TOL'), type=float),
    Tolerance.ZERO: Field(loc=MultiLoc(['RUN', 'TOLERANCE'], 'TOLERANCE', 'ZERO_TOL'), type=float),
    Tolerance.PIVOT: Field(loc=MultiLoc(['RUN', 'TOLERANCE'], 'TOLERANCE', 'PIVOT_TOL'), type=float),
    Tolerance.QUADRATURE: Field(loc=MultiLoc(['RUN', 'TOLERANCE'], 'TOLERANCE', 'QUAD_TOL'), type=float),
    Tolerance.PROFILE: Field(loc=MultiLoc(['RUN', 'TOLERANCE'], 'TOLERANCE', 'PROFILE_TOL'), type=float),
}

# JSON keys that mirror command line flags rather than INI options
_json_aliases = {'KMAX': 'K_MAX', 'COUNT': 'SPECTRUM_COUNT', 'DUMP-MATRICES': 'DUMP_MATRICES'}


def _option(fielddef):
    loc = fielddef.loc
    return loc.field if isinstance(loc, MultiLoc) else loc[1]


def _options(section):
    options = set()
    for fielddef in _schema.values():
        loc = fielddef.loc
        sections = loc.sections if isinstance(loc, MultiLoc) else [loc[0]]
        if section in sections:
            options.add(_option(fielddef))
    return options


class Parser:
    def __init__(self, cfg, strict=False):
        self.cfg = cfg
        self.strict = strict
        self.logger = logging.getLogger()

    def get_command(self):
        val = self.cfg.get('DEFAULT', 'COMMAND', fallback=None)
        if val is None:
            return None
        try:
            return Command(val.strip().lower())
        except ValueError as e:
            raise ConfigError('DEFAULT/COMMAND', f'unknown command {val}') from e

    def check_unknown(self):
        """
        Reject options of RUN and TOLERANCE that the schema does not know.
        """
        defaults = set(k.upper() for k in self.cfg.defaults())
        for section in ('RUN', 'TOLERANCE'):
            if not self.cfg.has_section(section):
                continue
            known = _options(section)
            for option in self.cfg.options(section):
                if option.upper() not in known and option.upper() not in defaults:
                    raise ConfigError(f'{section}/{option.upper()}', 'unknown key')

    def get(self, key, default=None):
        try:
            fielddef = _schema[key]
        except Exception as e:
            raise KeyError('Invalid configuration key') from e

        loc = fielddef.loc

        if isinstance(loc, MultiLoc):
            for s in loc.sections:
                val = self.__get((s, loc.field), fielddef, None)
                if val is not None:
                    return val
            return default
        else:
            return self.__get(loc, fielddef, default)

    def __get(self, loc, fielddef, default):
        try:
            if fielddef.type == int:
                val = self.cfg.getint(loc[0], loc[1], fallback=default)
            elif fielddef.type == float:
                val = self.cfg.getfloat(loc[0], loc[1], fallback=default)
            elif fielddef.type == bool:
                val = self.cfg.getboolean(loc[0], loc[1], fallback=default)
            elif fielddef.type == str:
                val = self.cfg.get(loc[0], loc[1], fallback=default)
                val = val.strip() or None if isinstance(val, str) else val
            elif fielddef.type == list:
                val = self.cfg.get(loc[0], loc[1], fallback=None)
                if val is None:
                    val = default
                else:
                    val = [fielddef.item(v.strip()) for v in val.split(',') if v.strip()]
            elif isinstance(fielddef.type, list):
                val = self.cfg.get(loc[0], loc[1], fallback=default)
                val = val.lower().strip() if val else val
                if val is not None and val not in fielddef.type:
                    raise ValueError(f'Invalid for key {loc[1]}: value {val}')
            else:
                raise ValueError(f'Invalid type: {fielddef.type}')
        except Exception as e:
            self.logger.error(f'Failed to get {loc}:{e}')
            if self.strict:
                raise ConfigError('/'.join(loc), str(e)) from e
            val = default
        return val


class Serializer:
    def __init__(self):
        self.cfg = ConfigParser()
        self.cfg.optionxform = str

    def set(self, key, value):
        try:
            fielddef = _schema[key]
        except Exception as e:
            raise KeyError('Invalid configuration key') from e

        loc = fielddef.loc
        if isinstance(loc, MultiLoc):
            section = loc.write_section
            option = loc.field
        else:
            section, option = loc[0], loc[1]

        if not self.cfg.has_section(section):
            self.cfg.add_section(section)

        # unset options stay absent so the defaults apply on reload
        if value is None:
            self.cfg.remove_option(section, option)
            return
        if isinstance(value, (list, tuple)):
            value = ','.join(str(v) for v in value)
        self.cfg.set(section, option, str(value))

    def set_command(self, command: Command):
        # DEFAULT section is special in ConfigParser and cannot be added
        self.cfg.set('DEFAULT', 'COMMAND', str(command))

    def write(self, cfile):
        self.cfg.write(cfile)


def _packaged_config():
    return os.path.join(os.path.dirname(os.path.dirname(__file__)), 'cidx.cfg')


def _read_json(cf, path):
    with open(path, 'r') as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f'{path}:{e.lineno}', f'invalid JSON: {e.msg}') from e
    if not isinstance(document, dict):
        raise ConfigError(path, 'expected a flat JSON object')
    known = _options('RUN')
    if not cf.has_section('RUN'):
        cf.add_section('RUN')
    for key, value in document.items():
        option = key.upper()
        option = _json_aliases.get(option, option)
        if option == 'COMMAND':
            cf.set('DEFAULT', 'COMMAND', str(value))
            continue
        if option not in known:
            raise ConfigError(key, 'unknown key')
        if isinstance(value, list):
            value = ','.join(str(v) for v in value)
        cf.set('RUN', option, '' if value is None else str(value))


def load_config(path=None):
    """
    Load the packaged defaults and the first configuration files found in
    /etc/cidx.cfg, ~/.cidxrc and ./cidx.cfg, or a given file. A given file
    ending in .json is read as a flat key/value document.

    :param path: (str) optional configuration file.
    :return: (ConfigParser)
    """
    pkgcfg = _packaged_config()
    cfgfile = ['/etc/cidx.cfg', os.path.expanduser('~/.cidxrc'), 'cidx.cfg', pkgcfg]

    noconfig = True
    for cfg in cfgfile:
        if os.path.isfile(cfg):
            noconfig = False
            break

    if noconfig:
        raise RuntimeError("No configuration file found.")
    cf = ConfigParser()
    cf.optionxform = str.upper
    # later files override earlier ones, packaged defaults come first
    cf.read([pkgcfg] + cfgfile[:-1])
    if path is not None:
        path = os.path.expanduser(path)
        if not os.path.isfile(path):
            raise RuntimeError("%s not found." % (path))
        if path.lower().endswith('.json'):
            _read_json(cf, path)
        else:
            cf.read(path)
    return cf


_link_spec = re.compile(r'^(equator|clifford:\d+|raw:.+)$', re.I)


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved settings of one cidx invocation.
    """
    command: Command
    n_list: tuple
    m: float
    link_specs: tuple
    reference: str
    R_ladder: tuple
    k_max: int
    grid_size: int
    output: str
    format: str
    count: int
    rho_ladder: tuple
    workers: int
    dump_matrices: str
    steklov_tol: float
    zero_tol: float
    pivot_tol: float
    quad_tol: float
    profile_tol: float

    def to_dict(self):
        d = asdict(self)
        d['command'] = str(self.command)
        for key in ('n_list', 'link_specs', 'R_ladder', 'rho_ladder'):
            d[key] = list(d[key])
        return d

    def serializer(self):
        s = Serializer()
        s.set_command(self.command)
        for key, value in ((Run.N, self.n_list), (Run.M, self.m), (Run.LINK, self.link_specs),
                           (Run.REFERENCE, self.reference), (Run.R, self.R_ladder), (Run.K_MAX, self.k_max),
                           (Run.GRID, self.grid_size), (Run.OUT, self.output), (Run.FORMAT, self.format),
                           (Run.COUNT, self.count), (Run.RHO, self.rho_ladder), (Run.WORKERS, self.workers),
                           (Run.DUMP_MATRICES, self.dump_matrices), (Tolerance.STEKLOV, self.steklov_tol),
                           (Tolerance.ZERO, self.zero_tol), (Tolerance.PIVOT, self.pivot_tol),
                           (Tolerance.QUADRATURE, self.quad_tol), (Tolerance.PROFILE, self.profile_tol)):
            s.set(key, value)
        return s


def _check(field, ok, message):
    if not ok:
        raise ConfigError(field, message)


def _override(value, arg, convert=None):
    if arg is None:
        return value
    if convert is not None:
        try:
            return convert(arg)
        except ValueError as e:
            raise ConfigError('command line', str(e)) from e
    return arg


def _split(item):
    return lambda text: [item(v.strip()) for v in str(text).split(',') if v.strip()]


def resolve_run_config(cfg, args=None):
    """
    Merge configuration and command line flags (flags win) and validate the
    result against the preconditions of the operations it feeds.

    :param cfg: (ConfigParser) from load_config.
    :param args: (argparse.Namespace) parsed flags, attributes left None are not set.
    :return: (RunConfig)
    """
    parser = Parser(cfg, strict=True)
    parser.check_unknown()

    def arg(name):
        return getattr(args, name, None) if args is not None else None

    command = _override(parser.get_command(), arg('command'))
    _check('command', command is not None, 'no command given')
    n_list = _override(parser.get(Run.N, [4]), arg('n'), _split(int))
    m = _override(parser.get(Run.M, 2.), arg('m'), float)
    links = _override(parser.get(Run.LINK, ['equator']), arg('link'), _split(str))
    reference = parser.get(Run.REFERENCE, 'equator')
    R_ladder = _override(parser.get(Run.R, [10., 100., 1000.]), arg('R'), _split(float))
    k_max = _override(parser.get(Run.K_MAX, 12), arg('kmax'), int)
    grid = _override(parser.get(Run.GRID, 2000), arg('grid'), int)
    output = _override(parser.get(Run.OUT, None), arg('out'))
    fmt = _override(parser.get(Run.FORMAT, 'csv'), arg('format'), lambda v: str(v).lower())
    count = _override(parser.get(Run.COUNT, 6), arg('count'), int)
    rho = _override(parser.get(Run.RHO, [10., 100., 1000.]), arg('rho'), _split(float))
    workers = _override(parser.get(Run.WORKERS, None), arg('workers'), int)
    dump = _override(parser.get(Run.DUMP_MATRICES, None), arg('dump_matrices'))
    tolerances = {t: parser.get(t, d) for t, d in ((Tolerance.STEKLOV, 1e-6), (Tolerance.ZERO, 1e-8),
                                                     (Tolerance.PIVOT, 1e-14), (Tolerance.QUADRATURE, 1e-10),
                                                     (Tolerance.PROFILE, 1e-10))}

    _check('RUN/N', n_list and all(n >= 3 for n in n_list), 'dimensions must be integers >= 3')
    _check('RUN/M', m > 0., 'mass must be positive')
    _check('RUN/LINK', links and all(_link_spec.match(s) for s in links),
           'links must be equator, clifford:p or raw:path')
    _check('RUN/REFERENCE', bool(_link_spec.match(reference or '')), 'reference must be a link specification')
    _check('RUN/R', R_ladder and all(r > 1. for r in R_ladder), 'radii are multiples of R0 and must exceed 1')
    _check('RUN/K_MAX', k_max >= 1, 'k_max must be >= 1')
    _check('RUN/GRID', grid >= 16, 'grid must have at least 16 nodes')
    _check('RUN/FORMAT', fmt in ('csv', 'json'), 'format must be csv or json')
    _check('RUN/SPECTRUM_COUNT', count >= 1, 'count must be >= 1')
    _check('RUN/RHO', rho and all(r > 0. for r in rho) and all(b > a for a, b in zip(rho, rho[1:])),
           'rho ladder must be positive and increasing')
    _check('RUN/WORKERS', workers is None or workers >= 1, 'workers must be >= 1')
    for t, value in tolerances.items():
        _check(f'TOLERANCE/{_option(_schema[t])}', value is not None and value > 0., 'tolerance must be positive')

    return RunConfig(command=command, n_list=tuple(int(n) for n in n_list), m=float(m), link_specs=tuple(links),
                     reference=reference, R_ladder=tuple(sorted(float(r) for r in R_ladder)), k_max=int(k_max),
                     grid_size=int(grid), output=output, format=fmt, count=int(count),
                     rho_ladder=tuple(float(r) for r in rho), workers=workers, dump_matrices=dump,
                     steklov_tol=tolerances[Tolerance.STEKLOV], zero_tol=tolerances[Tolerance.ZERO],
                     pivot_tol=tolerances[Tolerance.PIVOT], quad_tol=tolerances[Tolerance.QUADRATURE],
                     profile_tol=tolerances[Tolerance.PROFILE])
