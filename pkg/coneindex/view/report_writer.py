"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

CSV and JSON emitters for report documents.
"""

import csv
import io
import json
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEMA_FILE = os.path.join(os.path.dirname(__file__), 'report_schema_v1.json')


class ReportTable:
    """
    Rows of one command together with their column names.

    :param kind: (str) report kind, e.g. "index" or "density".
    :param columns: (tuple) column names.
    :param rows: (list) tuples matching columns.
    :param records: (list) full dictionaries, emitted in JSON.
    """

    def __init__(self, kind, columns, rows=None, records=None, sort_key=None):
        self.kind = kind
        self.columns = tuple(columns)
        self.rows = list(rows or [])
        self.records = list(records or [])
        self.sort_key = sort_key

    def add(self, row, record=None):
        if len(row) != len(self.columns):
            raise ValueError(f'row has {len(row)} values, {len(self.columns)} columns expected')
        self.rows.append(tuple(row))
        self.records.append(record if record is not None else dict(zip(self.columns, row)))

    def ordered(self):
        """
        Rows and records in a deterministic order.
        """
        pairs = list(zip(self.rows, self.records))
        if self.sort_key is not None:
            pairs.sort(key=lambda p: self.sort_key(p[0]))
        return [p[0] for p in pairs], [p[1] for p in pairs]


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating, np.integer)):
        return repr(value.item())
    return str(value)


def _plain(value):
    # JSON has no numpy scalars, tuples or non finite floats
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_csv(table, fp):
    rows, _ = table.ordered()
    writer = csv.writer(fp, lineterminator='\n')
    writer.writerow(table.columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def write_json(table, fp, provenance=None):
    _, records = table.ordered()
    document = {
        'schema_version': SCHEMA_VERSION,
        'kind': table.kind,
        'provenance': provenance or {},
        'columns': list(table.columns),
        'reports': records,
    }
    json.dump(_plain(document), fp, indent=2, sort_keys=True)
    fp.write('\n')


def render(table, fmt, provenance=None):
    """
    :return: (str) the table as CSV or JSON text.
    """
    buf = io.StringIO()
    if fmt == 'json':
        write_json(table, buf, provenance)
    elif fmt == 'csv':
        write_csv(table, buf)
    else:
        raise ValueError(f'Unknown format: {fmt}')
    return buf.getvalue()


def write_report(table, fmt, path=None, provenance=None, stream=None):
    """
    Write the table to path, or to stream when no path is given. A path
    naming a directory receives <kind>.<fmt>.

    :return: (str) the path written, or None for the stream.
    """
    text = render(table, fmt, provenance)
    if path is None:
        stream.write(text)
        return None
    if os.path.isdir(path):
        path = os.path.join(path, f'{table.kind}.{fmt}')
    with open(path, 'w', newline='') as fh:
        fh.write(text)
    logger.info('wrote %s report to %s', table.kind, path)
    return path


def load_schema():
    with open(SCHEMA_FILE, 'r') as fh:
        return json.load(fh)
