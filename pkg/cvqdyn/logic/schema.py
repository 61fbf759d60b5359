'''Parameter schemas for every scenario kind, and config validation.

A scenario config is a mapping (parsed from TOML by the command line)::

    scenario = "rutherford"
    units = "natural"

    [parameters]
    launch = 1000.0
    kinetic_energy = 5.0

    [solver]
    dx = 0.2
    dt = 1.0

    [output]
    name = "rutherford-desk"

:func:`validate` checks it against the schema of its kind and returns the
normalized config with every default filled in.

'''
import dataclasses
from typing import Any, Callable, Optional, Tuple

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.units as units
from cvqdyn.lib.units import CONSTANTS

FAST = 'fast'
SLOW = 'slow'
TIERS = (FAST, SLOW)

# launch distances above this many fm make collision runs slow-tier only
DESK_LAUNCH = 2000.0

_LABELS = {
    units.NATURAL: {
        'length': 'fm', 'time': 'fm/c', 'energy': 'MeV', 'mass': 'MeV/c^2',
        'momentum': 'MeV/c', 'frequency': 'c/fm', 'action': 'MeV fm/c',
    },
    units.SI: {
        'length': 'm', 'time': 's', 'energy': 'J', 'mass': 'kg',
        'momentum': 'kg m/s', 'frequency': 'rad/s', 'action': 'J s',
    },
}
_FIXED_LABELS = {'temperature': 'K', 'density': 'kg/m^3', 'charge': 'e',
                 'count': '1', 'flag': '1', 'choice': '1', 'ratio': '1'}


def unit_label(kind, mode):
    '''Human-readable unit of a quantity kind in a unit system.'''
    if kind in _FIXED_LABELS:
        return _FIXED_LABELS[kind]
    return _LABELS.get(mode, {}).get(kind, '1')


@dataclasses.dataclass(frozen=True)
class Param(object):
    name: str
    kind: str
    description: str
    required: bool = False
    default: Any = None
    type: type = float
    choices: Optional[Tuple] = None
    many: bool = False

    def describe(self, mode):
        return {
            'name': self.name,
            'unit': unit_label(self.kind, mode),
            'required': self.required,
            'default': self.default,
            'description': self.description,
        }


@dataclasses.dataclass(frozen=True)
class Scenario(object):
    name: str
    description: str
    units: str
    parameters: Tuple[Param, ...]
    solver: Tuple[Param, ...] = ()
    # predicate on the normalized parameters telling slow-tier runs apart
    slow: Callable = lambda params, solver: False
    allowed_units: Tuple[str, ...] = ()


def _solver(dx, dt, cadence=10):
    return (
        Param('dx', 'length', 'grid spacing', default=dx),
        Param('dt', 'time', 'time step', default=dt),
        Param('stencil', 'choice', 'second-derivative stencil',
              default='penta', type=str, choices=('tri', 'penta')),
        Param('cadence', 'count', 'steps between recorded samples',
              default=cadence, type=int),
    )


def _collision_params():
    return (
        Param('charge_projectile', 'charge', 'projectile atomic number',
              default=2.0),
        Param('charge_target', 'charge', 'target atomic number', default=79.0),
        Param('launch', 'length', 'launch distance L', required=True),
        Param('kinetic_energy', 'energy', 'kinetic energy T0 at launch',
              required=True),
        Param('mass', 'mass', 'projectile mass',
              default=CONSTANTS.alpha_particle_mass),
    )


SCENARIOS = dict((s.name, s) for s in (
    Scenario(
        'evolve',
        'Single Gaussian packet, free or in a harmonic trap, against its '
        'closed-form uncertainty product.',
        units.DIMENSIONLESS,
        (
            Param('sigma', 'length', 'initial position spread', required=True),
            Param('t_end', 'time', 'duration', required=True),
            Param('mass', 'mass', 'particle mass', default=1.0),
            Param('center', 'length', 'initial mean position', default=0.0),
            Param('momentum', 'momentum', 'initial mean momentum',
                  default=0.0),
            Param('potential', 'choice', 'external potential', default='free',
                  type=str, choices=('free', 'harmonic')),
            Param('omega', 'frequency', 'trap frequency', default=1.0),
        ),
        _solver(0.05, 0.01),
        slow=lambda p, s: p['t_end'] / s['dt'] > 2e5,
    ),
    Scenario(
        'box',
        'Hard-wall box from -length/2 to length/2: a stationary eigenstate, '
        'or a Gaussian packet bouncing between the walls.',
        units.DIMENSIONLESS,
        (
            Param('t_end', 'time', 'duration', required=True),
            Param('length', 'length', 'box length', default=20.0),
            Param('n', 'count', 'quantum number', default=1, type=int),
            Param('mass', 'mass', 'particle mass', default=1.0),
            Param('sigma', 'length',
                  'packet spread (omit for the n-th eigenstate)'),
            Param('center', 'length', 'initial mean position of the packet',
                  default=0.0),
            Param('momentum', 'momentum', 'initial mean momentum of the '
                  'packet', default=0.0),
        ),
        _solver(0.05, 0.01),
    ),
    Scenario(
        'rutherford',
        'Head-on Coulomb collision: classical and quantum closest approach, '
        'collision times and the initial force ratio.',
        units.NATURAL,
        _collision_params() + (
            Param('sigma', 'length',
                  'initial spread (default sqrt(hbar L / 2 p0))'),
            Param('sigmas', 'length', 'spreads to sweep instead of one run',
                  many=True),
            Param('colliding', 'flag',
                  'two identical nuclei launched from -L and +L',
                  default=False, type=bool),
            Param('t_end', 'time', 'duration (default 3 classical turning '
                  'times)'),
        ),
        _solver(0.2, 1.0),
        slow=lambda p, s: p['launch'] > DESK_LAUNCH,
        allowed_units=(units.NATURAL,),
    ),
    Scenario(
        'tunneling',
        'Crossing the Coulomb barrier cut at l: classical, WKB and '
        'dynamical probabilities over initial spreads.',
        units.NATURAL,
        _collision_params() + (
            Param('sigmas', 'length', 'initial spreads', required=True,
                  many=True),
            Param('barrier', 'length', 'barrier cut l', default=25.0),
            Param('free', 'flag', 'remove the potential', default=False,
                  type=bool),
            Param('max_steps', 'count', 'step budget per run', type=int),
        ),
        _solver(0.2, 1.0, cadence=1),
        slow=lambda p, s: p['launch'] > DESK_LAUNCH,
        allowed_units=(units.NATURAL,),
    ),
    Scenario(
        'entangle-gaussian',
        'Closed-form negativity and entropy of two Gaussian masses, free or '
        'trapped, optionally thermal.',
        units.SI,
        (
            Param('t_end', 'time', 'duration', required=True),
            Param('mass', 'mass', 'mass of each particle (or radius)'),
            Param('radius', 'length', 'sphere radius, mass from density'),
            Param('density', 'density', 'sphere density',
                  default=CONSTANTS.density_osmium),
            Param('separation', 'length', 'centre distance L'),
            Param('separation_ratio', 'ratio', 'L in units of the radius'),
            Param('sigma', 'length', 'ground-state spread (or omega0)'),
            Param('omega0', 'frequency', 'trap frequency (or sigma)'),
            Param('interaction', 'choice', 'interaction kind',
                  default='newtonian', type=str,
                  choices=('newtonian', 'mond', 'casimir')),
            Param('regime', 'choice', 'released or held in traps',
                  default='free', type=str, choices=('free', 'trapped')),
            Param('temperature', 'temperature', 'trap temperature',
                  default=0.0),
            Param('samples', 'count', 'number of time samples', default=101,
                  type=int),
        ),
        allowed_units=(units.SI, units.DIMENSIONLESS),
    ),
    Scenario(
        'entangle-numeric',
        'Numeric non-Gaussian entanglement of two identical particles under '
        'the order-N expansion of a power-law interaction.',
        units.DIMENSIONLESS,
        (
            Param('mass', 'mass', 'mass of each particle', default=1.0),
            Param('sigma', 'length', 'initial spread', default=1.0),
            Param('separation', 'length', 'baseline separation L',
                  default=20.0),
            Param('omega', 'frequency', 'coupling frequency of the '
                  'quadratic term', default=0.2),
            Param('power', 'count', 'power j of V = -C/(L + r)^j', default=1,
                  type=int),
            Param('p0', 'momentum', 'momentum of A (B gets -p0)',
                  default=0.5),
            Param('boost', 'ratio', 'common velocity of both particles',
                  default=0.0),
            Param('orders', 'count', 'expansion orders', default=(2, 3),
                  type=int, many=True),
            Param('t_end', 'time', 'duration', default=3.0),
            Param('schmidt', 'flag', 'also compute Schmidt spectra',
                  default=True, type=bool),
            Param('max_points', 'count', 'largest LAB grid per axis',
                  default=801, type=int),
            Param('amplification_window', 'time', 'first and last time at '
                  'which N=3 is compared with the force-gradient estimate',
                  default=(1.0, 3.0), many=True),
            Param('epsilon3_max', 'ratio', 'largest |eps3| at which that '
                  'estimate is trusted', default=0.1),
        ),
        _solver(0.05, 0.01),
        allowed_units=(units.DIMENSIONLESS,),
    ),
    Scenario(
        'mond-compare',
        'Newtonian against deep-MOND entanglement of two levitated spheres, '
        'with thermal noise and the 0.01 detectability threshold.',
        units.SI,
        (
            Param('radius', 'length', 'sphere radius', required=True),
            Param('omega0', 'frequency', 'trap frequency', required=True),
            Param('t_end', 'time', 'duration', required=True),
            Param('material', 'choice', 'sphere material', default='osmium',
                  type=str, choices=('osmium', 'silica')),
            Param('separation_ratio', 'ratio', 'L in units of the radius',
                  default=2.5),
            Param('temperature', 'temperature', 'trap temperature',
                  default=0.0),
            Param('threshold', 'ratio', 'detectable negativity',
                  default=0.01),
            Param('samples', 'count', 'number of time samples', default=201,
                  type=int),
        ),
        allowed_units=(units.SI,),
    ),
    Scenario(
        'casimir-compare',
        'Gravity against Casimir coupling of two spheres near contact.',
        units.SI,
        (
            Param('mass', 'mass', 'mass of each sphere', required=True),
            Param('omega0', 'frequency', 'trap frequency', required=True),
            Param('t_end', 'time', 'duration', required=True),
            Param('density', 'density', 'sphere density',
                  default=CONSTANTS.density_silica),
            Param('separation_ratio', 'ratio', 'L in units of the radius',
                  default=2.1),
            Param('samples', 'count', 'number of time samples', default=101,
                  type=int),
        ),
        allowed_units=(units.SI,),
    ),
    Scenario(
        'convergence',
        'Order of accuracy of the stencils on a free packet, or step-size '
        'study of a Rutherford run.',
        units.DIMENSIONLESS,
        (
            Param('target', 'choice', 'what to converge', default='free',
                  type=str, choices=('free', 'rutherford')),
            Param('spacings', 'length', 'grid spacings',
                  default=(0.4, 0.2, 0.1, 0.05), many=True),
            Param('time_steps', 'time', 'time step per spacing (default: '
                  'time_step_rule for free, dt for rutherford)',
                  many=True),
            Param('time_step_rule', 'choice', 'free target without '
                  'time_steps: "scaled" takes min(dt, dx^2/4), "fixed" '
                  'takes dt at every spacing', default='scaled', type=str,
                  choices=('scaled', 'fixed')),
            Param('sigma', 'length', 'initial spread', default=2.0),
            Param('center', 'length', 'initial mean position', default=-50.0),
            Param('momentum', 'momentum', 'initial mean momentum',
                  default=1.0),
            Param('mass', 'mass', 'particle mass', default=1.0),
            Param('t_end', 'time', 'duration', default=20.0),
            Param('charge_projectile', 'charge', 'projectile atomic number',
                  default=2.0),
            Param('charge_target', 'charge', 'target atomic number',
                  default=79.0),
            Param('launch', 'length', 'launch distance L', default=1000.0),
            Param('kinetic_energy', 'energy', 'kinetic energy T0',
                  default=5.0),
        ),
        _solver(0.05, 0.01),
        slow=lambda p, s: (p['target'] == 'rutherford' and
                           p['launch'] > DESK_LAUNCH),
    ),
))


def scenario(name):
    try:
        return SCENARIOS[name]
    except KeyError:
        raise exceptions.ValidationError(
            {'scenario': ['unknown scenario {0!r}, expected one of {1}'
                          .format(name, ', '.join(sorted(SCENARIOS)))]})


def _coerce(param, value):
    if param.type is bool:
        if not isinstance(value, bool):
            raise ValueError('must be true or false')
        return value
    if param.type is str:
        if not isinstance(value, str):
            raise ValueError('must be a string')
        if param.choices and value not in param.choices:
            raise ValueError('must be one of {0}'.format(
                ', '.join(param.choices)))
        return value
    if isinstance(value, bool):
        raise ValueError('must be a number')
    if param.type is int:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError('must be an integer')
        return int(value)
    return float(value)


def _apply(params, values, section, errors):
    values = dict(values or {})
    result = {}
    known = set()
    for param in params:
        known.add(param.name)
        key = param.name if section is None else '{0}.{1}'.format(
            section, param.name)
        if param.name not in values:
            if param.required:
                errors[key] = ['missing value']
            result[param.name] = param.default
            continue
        raw = values[param.name]
        try:
            if param.many:
                if not isinstance(raw, (list, tuple)) or not raw:
                    raise ValueError('must be a non-empty list')
                result[param.name] = tuple(_coerce(param, v) for v in raw)
            else:
                result[param.name] = _coerce(param, raw)
        except (TypeError, ValueError) as e:
            errors[key] = [str(e)]
    for extra in sorted(set(values) - known):
        key = extra if section is None else '{0}.{1}'.format(section, extra)
        errors[key] = ['unknown parameter']
    return result


def _scenario_rules(name, mode, params, errors):
    '''Cross-field rules a flat schema cannot express.'''
    if name == 'entangle-gaussian':
        if params['mass'] is None and params['radius'] is None:
            errors['parameters.mass'] = ['give mass or radius']
        if params['separation'] is None and params['separation_ratio'] is None:
            errors['parameters.separation'] = ['give separation or separation_ratio']
        if params['sigma'] is None and params['omega0'] is None:
            errors['parameters.sigma'] = ['give sigma or omega0']
    if name == 'convergence' and params['time_steps'] is not None and \
            len(params['time_steps']) != len(params['spacings']):
        errors['parameters.time_steps'] = ['needs one step per spacing']
    if name == 'convergence' and params['target'] == 'rutherford' and \
            mode != units.NATURAL:
        errors['units'] = ['rutherford convergence runs in natural units']
    if name == 'entangle-numeric':
        if any(n < 2 for n in params.get('orders', ())):
            errors['parameters.orders'] = ['orders start at 2']
        window = params.get('amplification_window', (0.0, 1.0))
        if len(window) != 2 or not window[0] < window[1]:
            errors['parameters.amplification_window'] = [
                'needs a start and a later end']
        if not params.get('epsilon3_max', 1.0) > 0:
            errors['parameters.epsilon3_max'] = ['must be positive']
    for key in ('sigma', 'launch', 'kinetic_energy', 'mass', 't_end',
                'radius', 'omega0', 'separation'):
        value = params.get(key)
        if value is not None and not value > 0:
            errors['parameters.' + key] = ['must be positive']


def validate(config, tier=FAST):
    '''Check a parsed config and fill in defaults.

    :returns: dict with keys ``scenario``, ``units``, ``parameters``,
        ``solver``, ``output`` and ``tier``

    :raises cvqdyn.exceptions.ValidationError: naming every offending field

    '''
    if not isinstance(config, dict):
        raise exceptions.ValidationError({'config': ['must be a table']})
    if 'scenario' not in config:
        raise exceptions.ValidationError({'scenario': ['missing value']})
    kind = scenario(config['scenario'])
    errors = {}
    top = set(config) - {'scenario', 'units', 'parameters', 'solver',
                         'output'}
    for extra in sorted(top):
        errors[extra] = ['unknown key']
    mode = config.get('units', kind.units)
    if mode not in units.MODES:
        errors['units'] = ['must be one of {0}'.format(', '.join(units.MODES))]
    elif kind.allowed_units and mode not in kind.allowed_units:
        errors['units'] = ['{0} runs in {1} units'.format(
            kind.name, ' or '.join(kind.allowed_units))]
    params = _apply(kind.parameters, config.get('parameters'), 'parameters',
                    errors)
    solver = _apply(kind.solver, config.get('solver'), 'solver', errors)
    if solver.get('dt') == 0:
        errors['solver.dt'] = ['must be non-zero']
    if solver.get('dx') is not None and not solver['dx'] > 0:
        errors['solver.dx'] = ['must be positive']
    if solver.get('cadence') is not None and solver['cadence'] < 1:
        errors['solver.cadence'] = ['must be at least 1']
    output = dict(config.get('output') or {})
    if errors:
        raise exceptions.ValidationError(errors)
    _scenario_rules(kind.name, mode, params, errors)
    if tier not in TIERS:
        errors['tier'] = ['must be fast or slow']
    elif tier == FAST and kind.slow(params, solver):
        errors['tier'] = ['this configuration needs --tier slow']
    if errors:
        raise exceptions.ValidationError(errors)
    return {
        'scenario': kind.name,
        'units': mode,
        'parameters': params,
        'solver': solver,
        'output': {'name': output.get('name') or kind.name},
        'tier': tier,
    }


def describe(name, mode=None):
    kind = scenario(name)
    mode = mode or kind.units
    return {
        'scenario': kind.name,
        'description': kind.description,
        'units': mode,
        'parameters': [p.describe(mode) for p in kind.parameters],
        'solver': [p.describe(mode) for p in kind.solver],
    }
