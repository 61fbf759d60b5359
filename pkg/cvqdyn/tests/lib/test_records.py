import json
import os
import shutil
import tempfile
import unittest

import numpy as np
import numpy.testing as npt

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.records as records


def _trajectory():
    return records.SeriesRecord(
        'trajectory',
        {'t': [0.0, 10.0, 20.0], 'mean_x': [-1000.0, -999.5, -998.0]},
        {'t': 'fm/c', 'mean_x': 'fm'},
        {'d_cl': 43.52})


class TestSeriesRecord(unittest.TestCase):

    def test_it_needs_columns(self):
        with self.assertRaises(ValueError):
            records.SeriesRecord('empty', {})

    def test_columns_must_have_equal_lengths(self):
        with self.assertRaises(ValueError):
            records.SeriesRecord('ragged', {'a': [1.0, 2.0], 'b': [1.0]})

    def test_columns_keep_their_order(self):
        record = _trajectory()
        assert record.field_names == ['t', 'mean_x']
        assert len(record) == 3

    def test_missing_units_are_dimensionless(self):
        assert records.SeriesRecord('x', {'n': [1.0]}).unit('n') == '1'

    def test_scalars_become_one_row(self):
        assert len(records.SeriesRecord('x', {'a': 1.0, 'b': 2.0})) == 1


class TestFiles(unittest.TestCase):

    def setUp(self):
        self.dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.dir)

    def test_csv_files_read_back(self):
        path = _trajectory().write_csv(os.path.join(self.dir, 'x.csv'))
        with open(path) as f:
            head = [next(f) for _ in range(4)]
        assert head == ['# series: trajectory\n',
                        '# units: t=fm/c,mean_x=fm\n',
                        '# d_cl=43.52\n',
                        't,mean_x\n']
        record = records.read_csv(path)
        assert record.name == 'trajectory'
        assert record.units == {'t': 'fm/c', 'mean_x': 'fm'}
        assert record.metadata == {'d_cl': '43.52'}
        npt.assert_array_equal(record.columns['mean_x'],
                               [-1000.0, -999.5, -998.0])

    def test_write_package(self):
        energy = records.SeriesRecord('energy', {'t': [0.0, 1.0],
                                                 'E': [5.2, 5.2]})
        paths = records.write_package(self.dir, 'Rutherford Desk',
                                      [_trajectory(), energy],
                                      description='desk run')
        assert [os.path.basename(p) for p in paths] == [
            'rutherford-desk-trajectory.csv', 'rutherford-desk-energy.csv',
            'datapackage.json']
        with open(paths[-1]) as f:
            descriptor = json.load(f)
        assert descriptor['name'] == 'rutherford-desk'
        assert descriptor['description'] == 'desk run'
        resource = descriptor['resources'][0]
        assert resource['path'] == 'rutherford-desk-trajectory.csv'
        assert resource['dialect']['commentChar'] == '#'
        field = resource['schema']['fields'][1]
        assert (field['name'], field['type'], field['unit']) == (
            'mean_x', 'number', 'fm')

    def test_non_finite_values_write_nothing(self):
        out = os.path.join(self.dir, 'run')
        bad = records.SeriesRecord('bad', {'t': [0.0, 1.0],
                                           'E': [1.0, np.nan]})
        with self.assertRaises(exceptions.InvariantViolationException):
            records.write_package(out, 'run', [_trajectory(), bad])
        assert not os.path.exists(out)

    def test_series_names_must_be_unique(self):
        with self.assertRaises(ValueError):
            records.write_package(self.dir, 'run',
                                  [_trajectory(), _trajectory()])

    def test_write_manifest(self):
        checks = [records.Check('norm_conserved', True, fatal=True),
                  records.Check('bound', False)]
        path = records.write_manifest(self.dir, 'abc123', '0.4.0', 'evolve',
                                      1.5, checks, solver={'dx': 0.05})
        with open(path) as f:
            manifest = json.load(f)
        assert manifest == {
            'config_sha256': 'abc123',
            'version': '0.4.0',
            'scenario': 'evolve',
            'wall_seconds': 1.5,
            'checks': [{'name': 'norm_conserved', 'pass': True},
                       {'name': 'bound', 'pass': False}],
            'solver': {'dx': 0.05},
        }
