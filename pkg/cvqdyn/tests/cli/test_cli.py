import io
import json
import os
import shutil
import tempfile
import unittest

import mock
import numpy.testing as npt

import cvqdyn
import cvqdyn.cli as cli
import cvqdyn.exceptions as exceptions
import cvqdyn.lib.records as records
import cvqdyn.logic.action.run as run
import cvqdyn.tests.helpers as custom_helpers
from cvqdyn.lib.records import Check, SeriesRecord


def _main(*argv):
    with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout:
        code = cli.main(list(argv))
    return code, stdout.getvalue()


class TestRun(unittest.TestCase):

    def setUp(self):
        self.dir = tempfile.mkdtemp()
        self.out = os.path.join(self.dir, 'out')

    def tearDown(self):
        shutil.rmtree(self.dir)

    def test_it_writes_the_series_and_the_manifest(self):
        code, stdout = _main('run', '--config',
                             custom_helpers.fixture_path('evolve-free.toml'),
                             '--out', self.out)
        assert code == cli.EXIT_OK
        assert sorted(os.listdir(self.out)) == [
            'datapackage.json', 'evolve-free-evolution.csv', 'manifest.json']
        assert stdout.startswith('evolve: 1 series')

        with open(os.path.join(self.out, 'manifest.json')) as f:
            manifest = json.load(f)
        assert manifest['scenario'] == 'evolve'
        assert manifest['version'] == cvqdyn.__version__
        assert len(manifest['config_sha256']) == 64
        assert all(c['pass'] for c in manifest['checks'])
        assert manifest['solver']['stencil'] == 'penta'

        record = records.read_csv(
            os.path.join(self.out, 'evolve-free-evolution.csv'))
        npt.assert_allclose(record.columns['norm'], 1.0, atol=1e-8)

    def test_it_exits_2_on_an_invalid_config(self):
        code, _ = _main('run', '--config', custom_helpers.fixture_path(
            'evolve-missing-sigma.toml'), '--out', self.out)
        assert code == cli.EXIT_INVALID
        assert not os.path.exists(self.out)

    def test_it_exits_2_on_a_missing_file(self):
        code, _ = _main('run', '--config',
                        os.path.join(self.dir, 'nowhere.toml'))
        assert code == cli.EXIT_INVALID

    def test_it_exits_2_on_malformed_toml(self):
        path = os.path.join(self.dir, 'broken.toml')
        with open(path, 'w') as f:
            f.write('scenario = \n')
        code, _ = _main('validate', '--config', path)
        assert code == cli.EXIT_INVALID

    def test_it_exits_3_on_a_numerical_failure(self):
        def runner(params, solver, unit, context):
            raise exceptions.SingularFactorizationException('zero pivot')

        with mock.patch.dict(run.RUNNERS, {'box': runner}):
            code, _ = _main('run', '--config',
                            custom_helpers.fixture_path('box.toml'),
                            '--out', self.out)
        assert code == cli.EXIT_NUMERICAL
        assert not os.path.exists(self.out)

    def test_it_exits_4_and_writes_nothing_on_a_failed_invariant(self):
        def runner(params, solver, unit, context):
            return [SeriesRecord('stationarity', {'t': [0.0]})], \
                [Check('norm_conserved', False, fatal=True)]

        with mock.patch.dict(run.RUNNERS, {'box': runner}):
            code, _ = _main('run', '--config',
                            custom_helpers.fixture_path('box.toml'),
                            '--out', self.out)
        assert code == cli.EXIT_INVARIANT
        assert not os.path.exists(self.out)

    def test_it_reports_failed_soft_checks(self):
        def runner(params, solver, unit, context):
            return [SeriesRecord('stationarity', {'t': [0.0, 1.0]})], \
                [Check('density_stationary', False)]

        with mock.patch.dict(run.RUNNERS, {'box': runner}):
            code, stdout = _main('run', '--config',
                                 custom_helpers.fixture_path('box.toml'),
                                 '--out', self.out)
        assert code == cli.EXIT_OK
        assert 'failed checks: density_stationary' in stdout
        with open(os.path.join(self.out, 'manifest.json')) as f:
            assert json.load(f)['checks'] == [
                {'name': 'density_stationary', 'pass': False}]

    def test_the_threads_option_reaches_the_runner(self):
        seen = {}

        def runner(params, solver, unit, context):
            seen.update(context)
            return [SeriesRecord('stationarity', {'t': [0.0]})], []

        with mock.patch.dict(run.RUNNERS, {'box': runner}):
            _main('run', '--config', custom_helpers.fixture_path('box.toml'),
                  '--out', self.out, '--threads', '3')
        assert seen == {'tier': 'fast', 'threads': 3}


class TestOtherCommands(unittest.TestCase):

    def test_validate_prints_the_normalized_config(self):
        code, stdout = _main('validate', '--config',
                             custom_helpers.fixture_path('box.toml'))
        assert code == cli.EXIT_OK
        normalized = json.loads(stdout)
        assert normalized['parameters']['n'] == 2
        assert normalized['parameters']['mass'] == 1.0

    def test_validate_respects_the_tier(self):
        path = custom_helpers.fixture_path('rutherford-10pm.toml')
        assert _main('validate', '--config', path)[0] == cli.EXIT_INVALID
        assert _main('validate', '--config', path, '--tier', 'slow')[0] == \
            cli.EXIT_OK

    def test_describe_prints_the_parameters(self):
        code, stdout = _main('describe', 'mond-compare')
        assert code == cli.EXIT_OK
        described = json.loads(stdout)
        assert described['units'] == 'si'
        assert 'radius' in [p['name'] for p in described['parameters']]

    def test_describe_exits_2_on_an_unknown_scenario(self):
        assert _main('describe', 'teleport')[0] == cli.EXIT_INVALID

    def test_list_scenarios(self):
        code, stdout = _main('list-scenarios')
        assert code == cli.EXIT_OK
        names = [line.split()[0] for line in stdout.splitlines()]
        assert 'entangle-numeric' in names
        assert len(names) == 9
