'''Series records and the files a run leaves behind.

Every run writes its series as CSV files, one per :class:`SeriesRecord`,
plus a ``datapackage.json`` descriptor listing them as tabular resources and
a ``manifest.json`` with the run's provenance and check outcomes.

CSV layout::

    # series: trajectory
    # units: t=fm/c,mean_x=fm
    # d_cl=43.5
    t,mean_x
    0.0,-1000.0

'''
import collections
import csv
import dataclasses
import json
import logging
import os
from typing import Dict, List

import datapackage
import numpy as np

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.util as util

log = logging.getLogger(__name__)

COMMENT = '#'
MANIFEST = 'manifest.json'
DESCRIPTOR = 'datapackage.json'


@dataclasses.dataclass
class Check(object):
    '''Outcome of one re-asserted invariant or acceptance comparison.

    A failed ``fatal`` check aborts the run before anything is written.

    '''
    name: str
    passed: bool
    fatal: bool = False
    detail: str = ''


@dataclasses.dataclass
class SeriesRecord(object):
    '''Named, equally long numeric columns with a unit per column.

    Columns keep their insertion order; ``metadata`` holds scalar
    annotations written as comment lines.

    '''
    name: str
    columns: Dict[str, np.ndarray]
    units: Dict[str, str] = dataclasses.field(default_factory=dict)
    metadata: Dict[str, object] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if not self.columns:
            raise ValueError('a series needs at least one column')
        self.columns = collections.OrderedDict(
            (k, np.atleast_1d(np.asarray(v, dtype=float)))
            for k, v in self.columns.items())
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) != 1:
            raise ValueError('series {0!r} is not rectangular: lengths {1}'
                             .format(self.name, sorted(lengths)))

    def __len__(self):
        return len(next(iter(self.columns.values())))

    @property
    def field_names(self):
        return list(self.columns)

    def unit(self, column):
        return self.units.get(column, '1')

    def rows(self):
        '''Yield rows of ``repr``-formatted floats.'''
        checked = [util.ensure_finite(k, v) for k, v in self.columns.items()]
        for i in range(len(self)):
            yield [repr(float(c[i])) for c in checked]

    def write_csv(self, path):
        rows = list(self.rows())
        with open(path, 'w', encoding='utf-8', newline='') as f:
            units = ','.join('{0}={1}'.format(k, self.unit(k))
                             for k in self.columns)
            f.write('{0} series: {1}\n'.format(COMMENT, self.name))
            f.write('{0} units: {1}\n'.format(COMMENT, units))
            for key in sorted(self.metadata):
                f.write('{0} {1}={2}\n'.format(COMMENT, key,
                                               _format(self.metadata[key])))
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(self.field_names)
            writer.writerows(rows)
        return path

    def schema(self):
        return {'fields': [{'name': k, 'type': 'number', 'unit': self.unit(k)}
                           for k in self.columns]}


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_csv(path):
    '''Read a file written by :meth:`SeriesRecord.write_csv` back in.'''
    units = {}
    metadata = {}
    name = os.path.splitext(os.path.basename(path))[0]
    with open(path, encoding='utf-8', newline='') as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if not line.startswith(COMMENT):
            body.append(line)
            continue
        text = line[len(COMMENT):].strip()
        if text.startswith('series:'):
            name = text.split(':', 1)[1].strip()
        elif text.startswith('units:'):
            for pair in text.split(':', 1)[1].strip().split(','):
                key, _, unit = pair.partition('=')
                units[key] = unit
        else:
            key, _, value = text.partition('=')
            metadata[key] = value
    reader = csv.reader(body)
    header = next(reader)
    values = np.array([[float(v) for v in row] for row in reader])
    values = values.reshape(-1, len(header))
    columns = collections.OrderedDict(
        (h, values[:, i]) for i, h in enumerate(header))
    return SeriesRecord(name, columns, units, metadata)


def write_package(out_dir, scenario, records: List[SeriesRecord],
                  description=''):
    '''Write every record as CSV and describe them in ``datapackage.json``.

    :returns: the paths written, descriptor last

    :raises cvqdyn.exceptions.InvariantViolationException: if a record has
        non-finite values or the descriptor does not validate

    '''
    for record in records:
        for key, values in record.columns.items():
            util.ensure_finite(key, values)
    os.makedirs(out_dir, exist_ok=True)
    resources = []
    paths = []
    seen = set()
    for record in records:
        name = util.resource_name(scenario, record.name)
        if name in seen:
            raise ValueError('duplicate series name {0!r}'.format(name))
        seen.add(name)
        filename = name + '.csv'
        paths.append(record.write_csv(os.path.join(out_dir, filename)))
        resources.append({
            'name': name,
            'path': filename,
            'profile': 'tabular-data-resource',
            'format': 'csv',
            'mediatype': 'text/csv',
            'encoding': 'utf-8',
            'dialect': {'commentChar': COMMENT, 'lineTerminator': '\n'},
            'schema': record.schema(),
        })
        log.info('wrote %s (%d rows)', filename, len(record))

    descriptor = {
        'name': util.resource_name(scenario),
        'profile': 'tabular-data-package',
        'resources': resources,
    }
    if description:
        descriptor['description'] = description
    try:
        package = datapackage.Package(descriptor, base_path=out_dir)
    except datapackage.exceptions.DataPackageException as e:
        raise exceptions.InvariantViolationException('datapackage', str(e))
    if not package.valid:
        raise exceptions.InvariantViolationException(
            'datapackage', '; '.join(str(e) for e in package.errors))
    target = os.path.join(out_dir, DESCRIPTOR)
    with open(target, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(package.descriptor, f, indent=2, sort_keys=True)
        f.write('\n')
    paths.append(target)
    return paths


def write_manifest(out_dir, config_sha256, version, scenario, wall_seconds,
                   checks, solver=None):
    manifest = {
        'config_sha256': config_sha256,
        'version': version,
        'scenario': scenario,
        'wall_seconds': wall_seconds,
        'checks': [{'name': c.name, 'pass': bool(c.passed)} for c in checks],
    }
    if solver:
        manifest['solver'] = solver
    path = os.path.join(out_dir, MANIFEST)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write('\n')
    return path
