'''The ``cvqdyn`` command line.

::

    cvqdyn run --config scenario.toml [--out DIR] [--tier fast|slow] [--threads N]
    cvqdyn validate --config scenario.toml
    cvqdyn describe entangle-numeric
    cvqdyn list-scenarios

Exit codes: 0 success, 2 invalid config, 3 numerical failure, 4 a run's
invariant check failed (nothing is written then).

'''
import argparse
import json
import logging
import logging.config
import sys
import time

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import cvqdyn
import cvqdyn.exceptions as exceptions
import cvqdyn.lib.records as records
import cvqdyn.lib.util as util
import cvqdyn.logic
import cvqdyn.logic.schema as schema

log = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)-5.5s [%(name)s] %(message)s'

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4


def load_config(path):
    '''Parse a TOML scenario config.

    :raises cvqdyn.exceptions.ValidationError: if the file is missing or is
        not valid TOML

    '''
    try:
        with open(path, 'rb') as f:
            return tomllib.load(f)
    except OSError as e:
        raise exceptions.ValidationError({'config': [str(e)]})
    except tomllib.TOMLDecodeError as e:
        raise exceptions.ValidationError(
            {'config': ['not valid TOML: {0}'.format(e)]})


def _context(args):
    return {'tier': args.tier, 'threads': util.thread_count(args.threads)}


def run(args):
    config = load_config(args.config)
    started = time.perf_counter()
    result = cvqdyn.logic.get_action('scenario_run')(_context(args), config)
    wall = time.perf_counter() - started
    normalized = result['config']
    out_dir = args.out or normalized['output']['name']
    name = normalized['output']['name']
    paths = records.write_package(
        out_dir, name, result['series'],
        description='{0} run ({1} units)'.format(normalized['scenario'],
                                                 normalized['units']))
    paths.append(records.write_manifest(
        out_dir, util.sha256_of_file(args.config), cvqdyn.__version__,
        normalized['scenario'], wall, result['checks'],
        solver=normalized['solver']))
    for path in paths:
        log.info('wrote %s', path)
    failed = [c.name for c in result['checks'] if not c.passed]
    print('{0}: {1} series in {2} ({3:.1f} s){4}'.format(
        normalized['scenario'], len(result['series']), out_dir, wall,
        ', failed checks: ' + ', '.join(failed) if failed else ''))
    return EXIT_OK


def validate(args):
    config = load_config(args.config)
    normalized = cvqdyn.logic.get_action('scenario_validate')(
        {'tier': args.tier}, config)
    print(json.dumps(normalized, indent=2, sort_keys=True))
    return EXIT_OK


def describe(args):
    schema_dict = cvqdyn.logic.get_action('scenario_describe')(
        {}, {'name': args.scenario, 'units': args.units})
    print(json.dumps(schema_dict, indent=2, sort_keys=True))
    return EXIT_OK


def list_scenarios(args):
    for entry in cvqdyn.logic.get_action('scenario_list')({}, {}):
        print('{0:<18} {1}'.format(entry['name'], entry['description']))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='cvqdyn',
        description='Continuous-variable two-body quantum dynamics.')
    parser.add_argument('--version', action='version',
                        version=cvqdyn.__version__)
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='log debug messages')
    parser.add_argument('--log-config',
                        help='INI file for logging.config.fileConfig')
    subparsers = parser.add_subparsers(dest='command', required=True)

    def with_config(sub):
        sub.add_argument('--config', required=True,
                         help='TOML scenario config')
        sub.add_argument('--tier', choices=schema.TIERS, default=schema.FAST)

    sub = subparsers.add_parser('run', help='run a scenario')
    with_config(sub)
    sub.add_argument('--out', help='output directory (default: output name)')
    sub.add_argument('--threads', type=int,
                     help='worker threads (default: $CVQDYN_THREADS or 1)')
    sub.set_defaults(handler=run)

    sub = subparsers.add_parser('validate', help='check a config, no compute')
    with_config(sub)
    sub.set_defaults(handler=validate)

    sub = subparsers.add_parser('describe',
                                help='print the parameters of a scenario')
    sub.add_argument('scenario')
    sub.add_argument('--units', help='label units in this system')
    sub.set_defaults(handler=describe)

    sub = subparsers.add_parser('list-scenarios', help='list scenario kinds')
    sub.set_defaults(handler=list_scenarios)
    return parser


def configure_logging(args):
    if args.log_config:
        logging.config.fileConfig(args.log_config,
                                  disable_existing_loggers=False)
    else:
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.INFO,
            format=LOG_FORMAT)


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args)
    try:
        return args.handler(args)
    except exceptions.ValidationError as e:
        log.error('invalid config: %s', e.error_summary)
        return EXIT_INVALID
    except exceptions.InvariantViolationException as e:
        log.error('invariant check failed: %s', e)
        return EXIT_INVARIANT
    except exceptions.NumericalFailureException as e:
        log.error('numerical failure (%s): %s', type(e).__name__, e)
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
