'''Scenario runners.

Each runner takes the normalized parameters and solver options of one
scenario kind and returns the series it produced and the checks it made.
:func:`scenario_run` is the action that validates a config, dispatches to
the runner and refuses results whose fatal checks failed.

'''
import concurrent.futures
import logging

import numpy as np

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core
import cvqdyn.lib.gaussian as gaussian
import cvqdyn.lib.nongaussian as nongaussian
import cvqdyn.lib.potentials as potentials
import cvqdyn.lib.scattering as scattering
import cvqdyn.lib.tdse as tdse
import cvqdyn.lib.units as units
import cvqdyn.logic.schema as schema
from cvqdyn.lib.records import Check, SeriesRecord
from cvqdyn.lib.units import CONSTANTS

log = logging.getLogger(__name__)

NORM_DRIFT = 1e-8
ENERGY_DRIFT = 1e-6
SCHMIDT_AGREEMENT = 1e-3
THERMAL_IDENTITY = 1e-12
PURITY = 1e-6


class _Units(object):
    '''Unit labels of one unit system, by quantity kind.'''
    def __init__(self, mode):
        self.system = units.UnitSystem(mode)
        self.mode = mode

    def __call__(self, **columns):
        return dict((k, schema.unit_label(kind, self.mode))
                    for k, kind in columns.items())

    @property
    def hbar(self):
        return self.system.hbar


def _map(function, items, threads):
    items = list(items)
    if threads > 1 and len(items) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(function, items))
    return [function(item) for item in items]


def _packet_grid(center, momentum, sigma, mass, t_end, dx, hbar, omega=None):
    '''A fixed grid that holds the packet for the whole run.'''
    policy = tdse.RegridPolicy()
    if omega is None:
        omega0 = hbar / (2.0 * mass * sigma ** 2)
        spread = sigma * np.sqrt(1.0 + (omega0 * t_end) ** 2)
        travel = momentum * t_end / mass
        lower = min(center, center + travel)
        upper = max(center, center + travel)
    else:
        spread = max(sigma, hbar / (2.0 * mass * omega * sigma))
        amplitude = abs(momentum) / (mass * omega)
        lower, upper = center - amplitude, center + amplitude
    margin = policy.expansion * core.WINDOW_SIGMAS * spread
    n_points = int(np.ceil((upper - lower + 2.0 * margin) / dx)) + 1
    return core.Grid.from_spacing(lower - margin, dx, n_points)


def _drift(values):
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values - values[0])))


def _evolve(params, solver, unit, context):
    hbar = unit.hbar
    mass, sigma = params['mass'], params['sigma']
    g = core.GaussianState(params['center'], sigma, params['momentum'])
    harmonic = params['potential'] == 'harmonic'
    omega = params['omega'] if harmonic else None
    grid = _packet_grid(g.center, g.momentum, sigma, mass, params['t_end'],
                        solver['dx'], hbar, omega)
    potential = None
    if harmonic:
        def potential(x):
            return 0.5 * mass * omega ** 2 * (x - g.center) ** 2
    propagator = tdse.Propagator(
        potential, mass, tdse.StepperConfig(solver['dt'], solver['stencil']),
        hbar)
    rows = []

    def observe(n, psi):
        m = propagator.moments(psi)
        if harmonic:
            exact = core.analytic_ho_uncertainty(psi.time, sigma, mass, omega,
                                                 hbar)
        else:
            exact = core.analytic_free_uncertainty(psi.time, sigma, mass, hbar)
        rows.append((psi.time, m.mean_x, m.mean_p, m.var_x, m.var_p,
                     m.uncertainty_product, exact, psi.norm(),
                     propagator.energy(psi)))

    psi = core.make_gaussian(grid, g, hbar)
    propagator.run(psi, int(round(params['t_end'] / solver['dt'])), observe,
                   solver['cadence'])
    data = np.array(rows)
    names = ('t', 'mean_x', 'mean_p', 'var_x', 'var_p', 'uncertainty',
             'uncertainty_exact', 'norm', 'energy')
    record = SeriesRecord('evolution', dict(zip(names, data.T)), unit(
        t='time', mean_x='length', mean_p='momentum', var_x='length',
        var_p='momentum', uncertainty='action', uncertainty_exact='action',
        norm='ratio', energy='energy'))
    record.units['var_x'] = record.units['var_x'] + '^2'
    record.units['var_p'] = record.units['var_p'] + '^2'
    energy = data[:, 8]
    mismatch = np.max(np.abs(data[:, 5] / data[:, 6] - 1.0))
    checks = [
        Check('norm_conserved', _drift(data[:, 7]) <= NORM_DRIFT, fatal=True),
        Check('energy_conserved',
              _drift(energy) <= ENERGY_DRIFT * abs(energy[0]), fatal=True),
        Check('uncertainty_bound',
              bool(np.all(data[:, 5] >= 0.5 * hbar * (1.0 - 1e-6)))),
        Check('uncertainty_matches_closed_form', mismatch <= 1e-3,
              detail='max relative deviation {0:.3g}'.format(mismatch)),
    ]
    return [record], checks


def _sign_flips(times, values):
    '''Times at which ``values`` changes sign, by linear interpolation.'''
    values = np.asarray(values, dtype=float)
    flips = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    return [float(times[i] - values[i] * (times[i + 1] - times[i]) /
                  (values[i + 1] - values[i])) for i in flips]


def _box(params, solver, unit, context):
    '''A hard-wall box spanning [-length/2, length/2].

    Without ``sigma`` the box holds its n-th eigenstate, which must stay
    stationary; with ``sigma`` a Gaussian packet bounces between the walls.

    '''
    hbar = unit.hbar
    length, n, mass = params['length'], params['n'], params['mass']
    grid = core.Grid.from_spacing(-0.5 * length, solver['dx'],
                                  int(round(length / solver['dx'])) + 1)
    packet = params['sigma'] is not None
    if packet:
        g = core.GaussianState(params['center'], params['sigma'],
                               params['momentum'])
        psi = core.make_gaussian(grid, g, hbar)
    else:
        psi = core.box_eigenstate(grid, n, hbar)
    initial = psi.density()
    propagator = tdse.Propagator(
        None, mass, tdse.StepperConfig(solver['dt'], solver['stencil']), hbar)
    rows = []

    def observe(step, state):
        m = propagator.moments(state)
        change = np.max(np.abs(state.density() - initial))
        rows.append((state.time, m.mean_x, m.mean_p, state.norm(),
                     propagator.energy(state), change))

    propagator.run(psi, int(round(params['t_end'] / solver['dt'])), observe,
                   solver['cadence'])
    data = np.array(rows)
    norm_check = Check('norm_conserved', _drift(data[:, 3]) <= NORM_DRIFT,
                       fatal=True)
    if not packet:
        continuum = (n * np.pi * hbar / grid.length) ** 2 / (2.0 * mass)
        record = SeriesRecord(
            'stationarity',
            dict(zip(('t', 'mean_x', 'mean_p', 'norm', 'energy',
                      'density_change'), data.T)),
            unit(t='time', mean_x='length', mean_p='momentum', norm='ratio',
                 energy='energy', density_change='ratio'),
            {'energy_continuum': continuum, 'n': n})
        record.units['density_change'] = '1/' + schema.unit_label(
            'length', unit.mode)
        return [record], [
            norm_check,
            Check('density_stationary',
                  np.max(data[:, 5]) <= 1e-8 * np.max(initial), fatal=True),
        ]

    speed = params['momentum'] / mass
    flips = _sign_flips(data[:, 0], data[:, 2])
    metadata = {'reflections': len(flips)}
    if speed != 0.0:
        wall = 0.5 * length if speed > 0 else -0.5 * length
        metadata['first_wall_time'] = (wall - params['center']) / speed
        metadata['crossing_time'] = length / abs(speed)
    if flips:
        metadata['first_flip'] = flips[0]
    record = SeriesRecord(
        'heartbeat',
        dict(zip(('t', 'mean_x', 'mean_p', 'norm', 'energy'), data[:, :5].T)),
        unit(t='time', mean_x='length', mean_p='momentum', norm='ratio',
             energy='energy'),
        metadata)
    energy = data[:, 4]
    checks = [
        norm_check,
        Check('energy_conserved',
              _drift(energy) <= ENERGY_DRIFT * abs(energy[0]), fatal=True),
        Check('momentum_reverses_at_walls', speed == 0.0 or bool(flips),
              detail='{0} sign changes of <p>'.format(len(flips))),
    ]
    return [record], checks


def _collision_config(params, sigma=None, **extra):
    config = scattering.CollisionConfig(
        charge_projectile=params['charge_projectile'],
        charge_target=params['charge_target'],
        launch=params['launch'],
        kinetic_energy=params['kinetic_energy'],
        sigma=1.0 if sigma is None else sigma,
        mass=params['mass'],
        **extra)
    if sigma is None:
        config = config.replace(sigma=scattering.optimal_spread(config))
    return config


def _solver_options(solver):
    return {'dx': solver['dx'], 'dt': solver['dt'],
            'stencil': solver['stencil']}


def _rutherford(params, solver, unit, context):
    threads = context.get('threads', 1)
    config = _collision_config(params, params.get('sigma'))
    options = _solver_options(solver)
    if params.get('sigmas'):
        rows = scattering.sigma_sweep(config, params['sigmas'], threads,
                                      cadence=solver['cadence'], **options)
        data = np.array(rows, dtype=float)
        record = SeriesRecord(
            'sweep', dict(zip(('sigma', 'd_qm', 'd_cl', 'bound_ok'), data.T)),
            unit(sigma='length', d_qm='length', d_cl='length',
                 bound_ok='flag'),
            {'sigma_optimal': scattering.optimal_spread(config)})
        best = data[int(np.argmin(data[:, 1] - data[:, 2])), 0]
        checks = [
            Check('closest_approach_bound', bool(np.all(data[:, 3] > 0))),
            Check('quantum_beyond_classical',
                  bool(np.all(data[:, 1] > data[:, 2]))),
            Check('optimal_spread_15pct',
                  abs(best / scattering.optimal_spread(config) - 1.0) <= 0.15,
                  detail='best sigma {0:g}'.format(best)),
        ]
        return [record], checks

    if params['colliding']:
        report = scattering.colliding_packets(
            config, t_end=params.get('t_end'), cadence=solver['cadence'],
            **options)
    else:
        report = scattering.quantum_collision(
            config, t_end=params.get('t_end'), cadence=solver['cadence'],
            **options)
    trajectory = SeriesRecord(
        'trajectory',
        {'t': report.times, 'x_classical': report.classical_x,
         'mean_x': report.mean_x, 'spread_x': report.spread_x,
         'energy': report.energy},
        unit(t='time', x_classical='length', mean_x='length',
             spread_x='length', energy='energy'))
    summary = {
        'd_cl': report.closest_approach_classical,
        'd_qm': report.closest_approach_quantum,
        'tau_cl': report.turning_time_classical,
        'tau_qm': report.collision_time_quantum,
        'sigma_optimal': report.optimal_spread,
        'sigma': config.sigma,
        'peak_energy_error': report.peak_energy_error,
    }
    kinds = dict(d_cl='length', d_qm='length', tau_cl='time', tau_qm='time',
                 sigma_optimal='length', sigma='length',
                 peak_energy_error='ratio')
    if report.return_asymmetry is not None:
        summary['return_asymmetry'] = report.return_asymmetry
        kinds['return_asymmetry'] = 'time'
    if not params['colliding']:
        summary['jensen_ratio'] = scattering.jensen_force_ratio(config)
        kinds['jensen_ratio'] = 'ratio'
    summary_record = SeriesRecord(
        'summary', dict((k, [v]) for k, v in summary.items()), unit(**kinds))
    checks = [
        Check('energy_conserved',
              report.peak_energy_error <= ENERGY_DRIFT, fatal=True,
              detail='peak relative error {0:.3g}'.format(
                  report.peak_energy_error)),
        Check('closest_approach_bound', report.bound_ok),
        Check('collision_after_classical',
              report.collision_time_quantum > report.turning_time_classical),
    ]
    if params['colliding']:
        checks.append(Check('relative_packet_returns',
                            report.return_asymmetry is not None))
    return [trajectory, summary_record], checks


def _tunneling(params, solver, unit, context):
    threads = context.get('threads', 1)
    base = _collision_config(params, params['sigmas'][0],
                             barrier=params['barrier'])
    try:
        wkb = scattering.wkb_tunneling(base)
    except exceptions.AboveBarrierException as e:
        log.warning('no WKB estimate: %s', e)
        wkb = None

    def job(sigma):
        config = base.replace(sigma=sigma)
        return (sigma,
                scattering.dynamical_tunneling(
                    config, max_steps=params.get('max_steps'),
                    free=params['free'], **_solver_options(solver)),
                scattering.classical_crossing_probability(config))

    data = np.array(_map(job, params['sigmas'], threads), dtype=float)
    columns = {'sigma': data[:, 0], 'p_tunnel': data[:, 1],
               'p_classical': data[:, 2]}
    if wkb is not None:
        columns['p_wkb'] = np.full(len(data), wkb)
    record = SeriesRecord(
        'probabilities', columns,
        unit(sigma='length', p_tunnel='ratio', p_classical='ratio',
             p_wkb='ratio'),
        {'barrier': params['barrier'], 'd_cl': base.closest_approach})
    values = np.concatenate([np.ravel(v) for k, v in columns.items()
                             if k != 'sigma'])
    checks = [Check('probabilities_in_unit_interval',
                    bool(np.all((values >= 0.0) & (values <= 1.0))),
                    fatal=True)]
    if not params['free']:
        checks.append(Check('quantum_exceeds_classical',
                            bool(np.all(data[:, 1] >= data[:, 2]))))
    return [record], checks


def _sphere_radius(mass, density):
    return (3.0 * mass / (4.0 * np.pi * density)) ** (1.0 / 3.0)


def _closed_form_series(times, omega_sq, omega0, mass, hbar, trapped=False):
    '''Covariance matrices along ``times`` for one coupling.'''
    omega = omega_sq.omega
    result = []
    for t in times:
        if trapped:
            cm = gaussian.covariance_trapped(t, omega, omega0, mass, hbar)
        elif omega_sq.attractive:
            cm = gaussian.covariance_freefall(t, omega, omega0, mass, hbar)
        else:
            cm = gaussian.covariance_repulsive(t, omega, omega0, mass,
                                               hbar=hbar)
        result.append(cm)
    return result


def _thermal_checks(negativity, thermal, nbar, name='thermal_identity'):
    expected = np.array([gaussian.thermal_negativity(e, nbar)
                         for e in negativity])
    error = float(np.max(np.abs(np.asarray(thermal) - expected)))
    return Check(name, error <= THERMAL_IDENTITY, fatal=True,
                 detail='max deviation {0:.3g}'.format(error))


def _entangle_gaussian(params, solver, unit, context):
    hbar = unit.hbar
    density = params['density']
    mass = params['mass']
    radius = params['radius']
    if mass is None:
        mass = units.sphere_mass(density, radius)
    if radius is None:
        radius = _sphere_radius(mass, density)
    separation = params['separation'] or params['separation_ratio'] * radius
    omega0 = params['omega0'] or hbar / (2.0 * mass * params['sigma'] ** 2)

    kind = params['interaction']
    if kind == 'newtonian':
        spec = potentials.Newtonian(mass, separation)
    elif kind == 'mond':
        spec = potentials.Mond(mass, separation)
    else:
        spec = potentials.Casimir(radius, separation, mass)
    omega_sq = potentials.omega_squared(spec)
    trapped = params['regime'] == 'trapped'

    times = np.linspace(0.0, params['t_end'], params['samples'])
    matrices = _closed_form_series(times, omega_sq, omega0, mass, hbar,
                                   trapped)
    negativity = np.array([gaussian.log_negativity(cm) for cm in matrices])
    entropy = np.array([gaussian.entropy_from_covariance(cm)
                        for cm in matrices])
    columns = {'t': times, 'E_closed': negativity, 'S_closed': entropy}
    checks = []
    pure = (0.5 * hbar) ** 4
    deviation = max(abs(cm.determinant() / pure - 1.0) for cm in matrices)
    checks.append(Check('pure_state_determinant', deviation <= PURITY,
                        fatal=True,
                        detail='max deviation {0:.3g}'.format(deviation)))
    if params['temperature'] > 0:
        nbar = gaussian.phonon_number(params['temperature'], omega0, hbar)
        thermal = np.array([gaussian.log_negativity(
            gaussian.thermal_scale(cm, nbar)) for cm in matrices])
        columns['E_thermal'] = thermal
        checks.append(_thermal_checks(negativity, thermal, nbar))
    record = SeriesRecord(
        'entanglement', columns, unit(t='time', E_closed='ratio',
                                      S_closed='ratio', E_thermal='ratio'),
        {'interaction': kind, 'regime': params['regime'], 'mass': mass,
         'separation': separation, 'omega0': omega0,
         'omega': omega_sq.omega, 'provenance': 'closed_form'})
    return [record], checks


def _numeric_spec(params):
    j = params['power']
    mass, separation = params['mass'], params['separation']
    strength = (params['omega'] ** 2 * mass * separation ** (j + 2) /
                (2.0 * j * (j + 1)))
    return potentials.GenericPotential(strength, separation, j, mass)


def _entangle_numeric(params, solver, unit, context):
    hbar = unit.hbar
    spec = _numeric_spec(params)
    mass, sigma, p0 = params['mass'], params['sigma'], params['p0']
    omega = params['omega']
    omega0 = hbar / (2.0 * mass * sigma ** 2)
    sample_dt = solver['dt'] * solver['cadence']
    records, checks = [], []
    series = {}
    for order in params['orders']:
        result = nongaussian.entanglement_series(
            spec, order, sigma, p0, params['t_end'], solver['dt'],
            cadence=solver['cadence'], dx=solver['dx'],
            stencil=solver['stencil'], hbar=hbar, boost=params['boost'],
            schmidt=params['schmidt'], threads=context.get('threads', 1),
            max_points=params['max_points'])
        series[order] = result
        records.append(SeriesRecord(
            'N{0}'.format(order),
            {'t': result.times, 'E': result.negativity, 'S': result.entropy,
             'S_cov': result.entropy_covariance, 'skewness': result.skewness,
             'mean_p': result.mean_p},
            unit(t='time', E='ratio', S='ratio', S_cov='ratio',
                 skewness='ratio', mean_p='momentum'),
            {'provenance': result.provenance}))
        try:
            index, ratio = nongaussian.momentum_witness(result.mean_p,
                                                        sample_dt)
        except (exceptions.ZeroMomentumCrossingException, ValueError) as e:
            log.warning('no momentum witness for N=%d: %s', order, e)
            continue
        records.append(SeriesRecord(
            'witness-N{0}'.format(order),
            {'t': result.times[index], 'ratio': ratio},
            {'t': schema.unit_label('time', unit.mode),
             'ratio': '1/' + schema.unit_label('time', unit.mode) + '^2'},
            {'omega_sq': omega ** 2}))
        spread = (np.max(ratio) - np.min(ratio)) / omega ** 2
        if order == 2:
            flat = np.max(np.abs(ratio / omega ** 2 - 1.0))
            checks.append(Check('witness_flat_N2', flat <= 1e-2,
                                detail='max deviation {0:.3g}'.format(flat)))
        else:
            checks.append(Check('witness_drift_N{0}'.format(order),
                                spread > 1e-2))

    times = next(iter(series.values())).times
    closed_e, closed_s = gaussian.freefall_entanglement(times, omega, omega0,
                                                        mass, hbar)
    records.append(SeriesRecord(
        'closed-form', {'t': times, 'E': closed_e, 'S': closed_s},
        unit(t='time', E='ratio', S='ratio'), {'provenance': 'closed_form'}))

    if 2 in series:
        baseline = series[2]
        gap = float(np.max(np.abs(baseline.negativity - closed_e)))
        checks.append(Check('closed_form_N2', gap <= 1e-3,
                            detail='max deviation {0:.3g}'.format(gap)))
        if params['schmidt']:
            gap = float(np.max(np.abs(baseline.entropy -
                                      baseline.entropy_covariance)))
            checks.append(Check('schmidt_matches_covariance',
                                gap <= SCHMIDT_AGREEMENT, fatal=True,
                                detail='max deviation {0:.3g}'.format(gap)))
        eps3 = potentials.epsilon3(spec, p0, mass, times)
        predicted_s = nongaussian.predict_amplified(baseline.entropy, eps3,
                                                    'entropy')
        predicted_e = nongaussian.predict_amplified(baseline.negativity,
                                                    eps3, 'negativity')
        records.append(SeriesRecord(
            'predicted', {'t': times, 'eps3': eps3, 'S': predicted_s,
                          'E': predicted_e},
            unit(t='time', eps3='ratio', S='ratio', E='ratio'),
            {'provenance': 'predicted'}))
        if 3 in series and p0 > 0:
            checks.extend(_amplification_checks(
                times, eps3, baseline, series[3],
                params['amplification_window'], params['epsilon3_max']))
    return records, checks


def _amplification_checks(times, eps3, baseline, measured, window, eps_max):
    '''Compare N=3 with the force-gradient estimate sample by sample.

    Only samples inside ``window`` with |eps3| <= ``eps_max`` take part;
    the estimate is first order in eps3.

    '''
    start, end = window
    inside = ((times >= start) & (times <= end) & (np.abs(eps3) <= eps_max) &
              (baseline.entropy > 0) & (baseline.negativity > 0))
    if not np.any(inside):
        log.warning('no samples in [%g, %g] with |eps3| <= %g, skipping the '
                    'amplification checks', start, end, eps_max)
        return []
    checks = []
    for name, value, base, factor in (
            ('entropy', measured.entropy, baseline.entropy, eps3),
            ('negativity', measured.negativity, baseline.negativity,
             0.5 * eps3)):
        ratio = value[inside] / base[inside]
        deviation = np.abs(ratio - (1.0 + factor[inside])) / \
            (1.0 + factor[inside])
        worst = int(np.argmax(deviation))
        checks.append(Check(
            'amplification_{0}_5pct'.format(name),
            bool(np.all(deviation <= 0.05)),
            detail='worst {0:.3g} at t={1:g} over {2} samples'.format(
                deviation[worst], times[inside][worst], int(inside.sum()))))
    return checks


_MATERIALS = {'osmium': CONSTANTS.density_osmium,
              'silica': CONSTANTS.density_silica}


def _detection_window(times, newton, mond, threshold):
    inside = (newton == 0.0) & (mond > threshold)
    if not np.any(inside):
        return None
    hits = times[inside]
    return float(hits[0]), float(hits[-1])


def _mond_compare(params, solver, unit, context):
    hbar = unit.hbar
    density = _MATERIALS[params['material']]
    radius = params['radius']
    mass = units.sphere_mass(density, radius)
    separation = params['separation_ratio'] * radius
    omega0 = params['omega0']
    nbar = gaussian.phonon_number(params['temperature'], omega0, hbar)
    couplings = {
        'newton': potentials.omega_squared(
            potentials.Newtonian(mass, separation)),
        'mond': potentials.omega_squared(potentials.Mond(mass, separation)),
    }
    times = np.linspace(0.0, params['t_end'], params['samples'])
    columns = {'t': times}
    checks = []
    for name, omega_sq in couplings.items():
        matrices = _closed_form_series(times, omega_sq, omega0, mass, hbar)
        pure = np.array([gaussian.log_negativity(cm) for cm in matrices])
        thermal = np.array([gaussian.log_negativity(
            gaussian.thermal_scale(cm, nbar)) for cm in matrices])
        columns['E_' + name] = pure
        columns['E_{0}_thermal'.format(name)] = thermal
        checks.append(_thermal_checks(pure, thermal, nbar,
                                      name='thermal_identity_' + name))
    metadata = {'threshold': params['threshold'], 'nbar': nbar,
                'mass': mass, 'separation': separation}
    window = _detection_window(times, columns['E_newton_thermal'],
                               columns['E_mond_thermal'], params['threshold'])
    if window is not None:
        metadata['window_start'], metadata['window_end'] = window
    checks.append(Check('detection_window', window is not None))
    record = SeriesRecord(
        'negativity', columns,
        dict((k, schema.unit_label('time' if k == 't' else 'ratio',
                                   unit.mode)) for k in columns),
        metadata)

    regime = potentials.mond_regime_check(density, radius, separation)
    checks.append(Check('deep_mond_regime', regime.deep_mond,
                        detail='L/R0 = {0:.3g}, threshold {1:.3g}'.format(
                            regime.ratio, regime.threshold)))
    summary = {'omega_newton': [couplings['newton'].omega],
               'omega_mond': [couplings['mond'].omega],
               'newtonian_acceleration': [regime.newtonian_acceleration]}
    kinds = dict(omega_newton='frequency', omega_mond='frequency')
    try:
        witness = gaussian.mond_witness_params(
            mass, separation, omega0,
            newtonian_acceleration=regime.newtonian_acceleration, hbar=hbar)
    except exceptions.DomainErrorException as e:
        log.warning('no trapped witness: %s', e)
    else:
        summary['critical_temperature'] = [witness.critical_temperature]
        summary['residual_amplitude'] = [witness.residual_amplitude]
        kinds.update(critical_temperature='temperature',
                     residual_amplitude='ratio')
    units_ = unit(**kinds)
    units_['newtonian_acceleration'] = 'm/s^2'
    return [record, SeriesRecord('witness', summary, units_)], checks


def _casimir_compare(params, solver, unit, context):
    hbar = unit.hbar
    mass, density = params['mass'], params['density']
    radius = _sphere_radius(mass, density)
    separation = params['separation_ratio'] * radius
    gravity = potentials.Newtonian(mass, separation)
    casimir = potentials.Casimir(radius, separation, mass)
    combined = potentials.Composite((gravity, casimir))
    couplings = [('gravity', potentials.omega_squared(gravity)),
                 ('casimir', potentials.omega_squared(casimir)),
                 ('combined', potentials.omega_squared(combined))]
    times = np.linspace(0.0, params['t_end'], params['samples'])
    columns = {'t': times}
    for name, omega_sq in couplings:
        matrices = _closed_form_series(times, omega_sq, params['omega0'],
                                       mass, hbar)
        columns['E_' + name] = [gaussian.log_negativity(cm) for cm in matrices]
    record = SeriesRecord(
        'negativity', columns,
        dict((k, schema.unit_label('time' if k == 't' else 'ratio',
                                   unit.mode)) for k in columns),
        {'radius': radius, 'separation': separation})
    values = dict(couplings)
    label = schema.unit_label('frequency', unit.mode) + '^2'
    summary = SeriesRecord(
        'couplings',
        dict(('omega_sq_' + k, [v.value]) for k, v in couplings),
        dict(('omega_sq_' + k, label) for k, _ in couplings))
    total = values['gravity'].value + values['casimir'].value
    checks = [
        Check('omega_sq_additive',
              abs(values['combined'].value - total) <= 1e-12 * total,
              fatal=True),
        Check('casimir_dominates',
              values['casimir'].value > values['gravity'].value),
    ]
    return [record, summary], checks


def _time_steps(spacings, dt, rule):
    '''One time step per spacing.

    ``fixed`` keeps ``dt``; the O(dt**2) Cayley error then floors the penta
    error at the finest spacings.  ``scaled`` uses min(dt, dx**2 / 4), which
    keeps the time error below the O(dx**4) penta error.

    '''
    if rule == 'fixed':
        return tuple(dt for _ in spacings)
    return tuple(min(dt, 0.25 * dx ** 2) for dx in spacings)


def _convergence_free(params, solver, unit, context):
    hbar = unit.hbar
    mass, sigma = params['mass'], params['sigma']
    g = core.GaussianState(params['center'], sigma, params['momentum'])
    t_end = params['t_end']
    spacings = params['spacings']
    steps = params['time_steps'] or _time_steps(
        spacings, solver['dt'], params['time_step_rule'])
    exact = core.analytic_free_uncertainty(t_end, sigma, mass, hbar)

    def job(item):
        stencil, dx, dt = item
        grid = _packet_grid(g.center, g.momentum, sigma, mass, t_end, dx, hbar)
        config = tdse.StepperConfig(dt, stencil)
        propagator = tdse.Propagator(None, mass, config, hbar)
        psi = propagator.run(core.make_gaussian(grid, g, hbar),
                             int(round(t_end / dt)))
        return abs(propagator.moments(psi).uncertainty_product - exact)

    jobs = [(s, dx, dt) for s in tdse.STENCILS
            for dx, dt in zip(spacings, steps)]
    errors = dict(zip(jobs, _map(job, jobs, context.get('threads', 1))))
    error_tri = np.array([errors[(tdse.TRI, dx, dt)]
                          for dx, dt in zip(spacings, steps)])
    error_penta = np.array([errors[(tdse.PENTA, dx, dt)]
                            for dx, dt in zip(spacings, steps)])
    order_tri = tdse.convergence_order(spacings, error_tri)
    order_penta = tdse.convergence_order(spacings, error_penta)
    log.info('fitted orders: tri %.3f, penta %.3f', order_tri, order_penta)
    record = SeriesRecord(
        'errors', {'dx': spacings, 'dt': steps, 'error_tri': error_tri,
                   'error_penta': error_penta},
        unit(dx='length', dt='time', error_tri='action',
             error_penta='action'),
        {'order_tri': order_tri, 'order_penta': order_penta,
         'time_step_rule': 'explicit' if params['time_steps'] else
         params['time_step_rule']})
    checks = [
        Check('order_tri', order_tri >= 1.8,
              detail='fitted {0:.3f}'.format(order_tri)),
        Check('order_penta', order_penta >= 3.5,
              detail='fitted {0:.3f}'.format(order_penta)),
        Check('penta_below_tri', bool(np.all(error_penta < error_tri))),
    ]
    return [record], checks


def _convergence_rutherford(params, solver, unit, context):
    config = _collision_config(
        dict(params, mass=CONSTANTS.alpha_particle_mass))
    spacings = params['spacings']
    steps = params['time_steps'] or (solver['dt'],) * len(spacings)

    def job(item):
        dx, dt = item
        report = scattering.quantum_collision(
            config, dx=dx, dt=dt, cadence=solver['cadence'],
            stencil=solver['stencil'])
        return report.closest_approach_quantum, report.peak_energy_error

    rows = np.array(_map(job, list(zip(spacings, steps)),
                         context.get('threads', 1)))
    record = SeriesRecord(
        'rutherford', {'dx': spacings, 'dt': steps, 'd_qm': rows[:, 0],
                       'peak_energy_error': rows[:, 1]},
        unit(dx='length', dt='time', d_qm='length', peak_energy_error='ratio'),
        {'d_cl': config.closest_approach, 'sigma': config.sigma})
    checks = [Check('energy_error_1e-6',
                    bool(np.all(rows[:, 1] <= ENERGY_DRIFT)))]
    return [record], checks


def _convergence(params, solver, unit, context):
    if params['target'] == 'rutherford':
        return _convergence_rutherford(params, solver, unit, context)
    return _convergence_free(params, solver, unit, context)


RUNNERS = {
    'evolve': _evolve,
    'box': _box,
    'rutherford': _rutherford,
    'tunneling': _tunneling,
    'entangle-gaussian': _entangle_gaussian,
    'entangle-numeric': _entangle_numeric,
    'mond-compare': _mond_compare,
    'casimir-compare': _casimir_compare,
    'convergence': _convergence,
}


def scenario_run(context, data_dict):
    '''Run one scenario.

    :param context: run settings: ``threads`` (default 1) and ``tier``
        (``'fast'`` or ``'slow'``, default ``'fast'``)
    :type context: dict
    :param data_dict: the scenario config, as parsed from TOML
    :type data_dict: dict

    :returns: dict with the normalized ``config``, the ``series`` (a list of
        :class:`cvqdyn.lib.records.SeriesRecord`) and the ``checks``
    :rtype: dict

    :raises cvqdyn.exceptions.ValidationError: if the config is invalid
    :raises cvqdyn.exceptions.InvariantViolationException: if a fatal check
        failed; nothing should be written then
    :raises cvqdyn.exceptions.NumericalFailureException: if the numerics
        broke down

    '''
    config = schema.validate(data_dict, context.get('tier', schema.FAST))
    name = config['scenario']
    log.info('running %s in %s units', name, config['units'])
    series, checks = RUNNERS[name](config['parameters'], config['solver'],
                                   _Units(config['units']), context)
    for check in checks:
        if check.passed:
            continue
        if check.fatal:
            raise exceptions.InvariantViolationException(check.name,
                                                         check.detail)
        log.warning('check %s failed %s', check.name, check.detail)
    return {'config': config, 'series': series, 'checks': checks}
