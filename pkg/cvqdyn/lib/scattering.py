'''Head-on Coulomb collisions of a projectile with a nucleus fixed at the
origin.

The projectile is launched from x = -L towards the target with kinetic
energy T0.  Lengths, times and energies follow the unit system of the
caller; the defaults are natural units (fm, fm/c, MeV) for alpha particles.
All energies are measured with the launch potential included,
E0 = T0 + V(L), so the classical closest approach is d_cl = k / E0 with
k = Z_P Z_T alpha hbar c.

'''
import concurrent.futures
import dataclasses
import logging
from typing import Optional

import numpy as np
from scipy import integrate, optimize, stats
from scipy.special import erfc

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core
import cvqdyn.lib.frames as frames
import cvqdyn.lib.tdse as tdse
from cvqdyn.lib.units import CONSTANTS

log = logging.getLogger(__name__)

BARRIER_CUT = 25.0
DEFAULT_DX = 0.2
DEFAULT_DT = 1.0
FLUX_THRESHOLD = 1e-12
FLUX_SAMPLES = 100
# quadrature window for the initial packet, in spreads
JENSEN_SIGMAS = 12.0


@dataclasses.dataclass(frozen=True)
class CollisionConfig(object):
    '''One projectile-target pair and its launch conditions.

    ``sigma`` is the spread of the initial position density and
    ``barrier`` the radius l inside which the Coulomb potential is kept when
    tunneling is studied.

    '''
    charge_projectile: float
    charge_target: float
    launch: float
    kinetic_energy: float
    sigma: float
    mass: float = CONSTANTS.alpha_particle_mass
    barrier: float = BARRIER_CUT
    hbar_c: float = CONSTANTS.hbar_c
    alpha: float = CONSTANTS.fine_structure_alpha

    def __post_init__(self):
        for name in ('launch', 'kinetic_energy', 'sigma', 'mass'):
            if not getattr(self, name) > 0:
                raise ValueError('{0} must be positive'.format(name))
        if self.launch < 10.0 * self.closest_approach:
            log.warning('launch distance %g is not much larger than d_cl=%g',
                        self.launch, self.closest_approach)

    @property
    def hbar(self):
        return self.hbar_c

    @property
    def coupling(self):
        return (self.charge_projectile * self.charge_target * self.alpha *
                self.hbar_c)

    @property
    def total_energy(self):
        return self.kinetic_energy + self.coupling / self.launch

    @property
    def closest_approach(self):
        return self.coupling / self.total_energy

    @property
    def momentum(self):
        return np.sqrt(2.0 * self.mass * self.kinetic_energy)

    @property
    def speed(self):
        '''Speed far from the target, sqrt(2 E0 / m).'''
        return np.sqrt(2.0 * self.total_energy / self.mass)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass
class CollisionReport(object):
    closest_approach_classical: float
    closest_approach_quantum: float
    turning_time_classical: float
    collision_time_quantum: float
    optimal_spread: float
    return_asymmetry: Optional[float]
    times: np.ndarray
    mean_x: np.ndarray
    spread_x: np.ndarray
    energy: np.ndarray
    classical_x: np.ndarray
    bound: float

    @property
    def bound_ok(self):
        return (self.closest_approach_classical <
                self.closest_approach_quantum <
                self.closest_approach_classical + self.bound)

    @property
    def peak_energy_error(self):
        reference = self.energy[0]
        return float(np.max(np.abs(self.energy - reference)) / abs(reference))


def classical_closest_approach(config):
    return config.closest_approach


def optimal_spread(config):
    '''The initial spread sqrt(hbar L / 2 p0) minimizing d_qm - d_cl.'''
    return np.sqrt(config.hbar * config.launch / (2.0 * config.momentum))


def _time_from_turning_point(config, distance):
    d = config.closest_approach
    distance = np.asarray(distance, dtype=float)
    s = np.sqrt(np.clip(1.0 - d / distance, 0.0, None))
    return (np.sqrt(config.mass / (2.0 * config.total_energy)) *
            (distance * s + 0.5 * d * np.log((1.0 + s) / (1.0 - s))))


def classical_turning_time(config):
    '''Time for the classical projectile to get from -L to -d_cl.'''
    return float(_time_from_turning_point(config, config.launch))


def _distance_at(config, elapsed):
    d = config.closest_approach
    if elapsed == 0:
        return d
    upper = 2.0 * d + config.speed * elapsed
    try:
        return optimize.brentq(
            lambda x: _time_from_turning_point(config, x) - elapsed, d, upper,
            xtol=1e-12 * upper, rtol=4.0 * np.finfo(float).eps)
    except ValueError as e:
        raise exceptions.RootBracketFailureException(
            'no turning-point root in [{0:g}, {1:g}]: {2}'.format(d, upper, e))


def classical_trajectory(config, t):
    '''Position, momentum and force of the classical projectile.

    The motion is symmetric about the turning time; the momentum is positive
    while the projectile approaches the target and negative afterwards.

    :param t: time or array of times, all non-negative
    :returns: ``(x, p, F)`` arrays shaped like ``t``

    :raises cvqdyn.exceptions.RootBracketFailureException: if the position
        cannot be bracketed

    '''
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError('trajectory times must be non-negative')
    tau = classical_turning_time(config)
    flat = t.ravel()
    distance = np.array([_distance_at(config, abs(ti - tau)) for ti in flat])
    x = -distance
    kinetic = np.clip(config.total_energy - config.coupling / distance, 0.0,
                      None)
    p = np.where(flat < tau, 1.0, -1.0) * np.sqrt(2.0 * config.mass * kinetic)
    force = -config.coupling / distance ** 2
    return x.reshape(t.shape), p.reshape(t.shape), force.reshape(t.shape)


def coulomb_grid_potential(config, dx):
    '''V(x) = k / |x| with the singularity capped at one grid spacing.'''
    k = config.coupling

    def potential(x):
        return k / np.maximum(np.abs(x), dx)
    return potential


def barrier_potential(config, dx):
    '''The Coulomb barrier truncated at x = l: zero beyond the cut.'''
    k = config.coupling
    cut = config.barrier

    def potential(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= cut, k / np.maximum(np.abs(x), dx), 0.0)
    return potential


def jensen_force_ratio(config):
    '''<F>/F_cl of the initial packet: the mean of 1/x**2 over the Gaussian
    density times L**2.

    '''
    L, sigma = config.launch, config.sigma
    if L <= JENSEN_SIGMAS * sigma:
        raise ValueError('the initial packet overlaps the target')
    density = stats.norm(loc=-L, scale=sigma).pdf
    excess, _ = integrate.quad(
        lambda x: density(x) * ((L / x) ** 2 - 1.0),
        -L - JENSEN_SIGMAS * sigma, -L + JENSEN_SIGMAS * sigma,
        epsabs=0.0, epsrel=1e-12, limit=200)
    return 1.0 + excess


def classical_crossing_probability(config):
    '''Share of a classical ensemble, with the Gaussian momentum density of
    the initial packet, that gets over the barrier at x = l.

    P_cl = (1/2)[1 - sign(p_lim - p0) erf(sqrt(2) sigma |p_lim - p0| / hbar)],
    evaluated through erfc so tiny probabilities keep their digits.

    '''
    L, cut = config.launch, config.barrier
    if not cut < L:
        raise ValueError('the barrier cut must lie inside the launch distance')
    p_lim = np.sqrt(2.0 * config.mass * config.total_energy *
                    (1.0 / cut - 1.0 / L) * config.closest_approach)
    z = np.sqrt(2.0) * config.sigma * (p_lim - config.momentum) / config.hbar
    return float(0.5 * erfc(z))


def wkb_action(config):
    '''The dimensionless action 2/hbar * int_l^d_cl sqrt(2m(V - E0)) dx.'''
    d, cut = config.closest_approach, config.barrier
    scale = np.sqrt(2.0 * config.mass * config.total_energy)
    integral, _ = integrate.quad(lambda x: np.sqrt(max(d / x - 1.0, 0.0)),
                                 cut, d, epsabs=0.0, epsrel=1e-11, limit=200)
    return 2.0 * scale * integral / config.hbar


def wkb_tunneling(config):
    '''WKB probability of getting through the Coulomb barrier cut at l.

    The prefactor hbar / sqrt(2m(V(l) - E0)) carries the length unit of the
    configuration; the result is clamped to [0, 1].

    :raises cvqdyn.exceptions.AboveBarrierException: if E0 >= V(l)

    '''
    d, cut = config.closest_approach, config.barrier
    if not d > cut:
        raise exceptions.AboveBarrierException(
            'E0 = {0:g} is not below V(l) = {1:g}'.format(
                config.total_energy, config.coupling / cut))
    prefactor = config.hbar / np.sqrt(
        2.0 * config.mass * config.total_energy * (d / cut - 1.0))
    value = prefactor * np.exp(-wkb_action(config))
    return float(np.clip(value, 0.0, 1.0))


def _spread_at(config, t):
    omega = config.hbar / (2.0 * config.mass * config.sigma ** 2)
    return config.sigma * np.sqrt(1.0 + (omega * t) ** 2)


def _initial_state(config, dx):
    g = core.GaussianState(-config.launch, config.sigma, config.momentum)
    half = tdse.RegridPolicy.expansion * core.WINDOW_SIGMAS * config.sigma
    grid = core.Grid.centered(-config.launch, half, dx)
    return core.make_gaussian(grid, g, config.hbar)


def _first_crossing(times, values, level):
    '''Linear interpolation of the first time ``values`` drops to ``level``.'''
    below = np.nonzero(values <= level)[0]
    if below.size == 0 or below[0] == 0:
        return None
    i = below[0]
    frac = (values[i - 1] - level) / (values[i - 1] - values[i])
    return times[i - 1] + frac * (times[i] - times[i - 1])


def quantum_collision(config, dx=DEFAULT_DX, dt=DEFAULT_DT, t_end=None,
                      cadence=10, stencil=tdse.PENTA, bound=None):
    '''Evolve the projectile packet in the Coulomb field of the target.

    The run lasts until ``t_end`` (default: three classical turning times),
    or until the mean position is back at -L after the turnaround.
    ``d_qm`` is the smallest |<x>| and ``tau_qm`` the time of minimal
    position spread.  The return asymmetry compares the time from the
    turnaround back to -L with the time it took to get there.

    :rtype: :class:`CollisionReport`

    '''
    tau = classical_turning_time(config)
    if t_end is None:
        t_end = 3.0 * tau
    psi = _initial_state(config, dx)
    propagator = tdse.Propagator(coulomb_grid_potential(config, dx),
                                 config.mass, tdse.StepperConfig(dt, stencil),
                                 config.hbar, tdse.RegridPolicy())
    samples = []

    def observe(n, state):
        _, mean, spread = core.position_stats(state)
        samples.append((state.time, mean, spread, propagator.energy(state)))
        nearest = max(s[1] for s in samples)
        return not (nearest > -0.5 * config.launch and mean < -config.launch)

    log.info('Rutherford run: L=%g T0=%g sigma=%g dx=%g dt=%g', config.launch,
             config.kinetic_energy, config.sigma, dx, dt)
    propagator.run(psi, int(round(t_end / dt)), observe, cadence)
    times, mean_x, spread_x, energy = (np.array(c) for c in zip(*samples))

    turn = int(np.argmin(np.abs(mean_x)))
    d_qm = float(np.abs(mean_x[turn]))
    t_turn = times[turn]
    t_back = _first_crossing(times[turn:] - t_turn, -mean_x[turn:],
                             config.launch)
    asymmetry = None if t_back is None else t_back - t_turn
    report = CollisionReport(
        closest_approach_classical=config.closest_approach,
        closest_approach_quantum=d_qm,
        turning_time_classical=tau,
        collision_time_quantum=float(times[int(np.argmin(spread_x))]),
        optimal_spread=optimal_spread(config),
        return_asymmetry=asymmetry,
        times=times,
        mean_x=mean_x,
        spread_x=spread_x,
        energy=energy,
        classical_x=classical_trajectory(config, times)[0],
        bound=optimal_spread(config) if bound is None else bound,
    )
    if not report.bound_ok:
        log.warning('d_qm=%g outside (d_cl, d_cl + %g) for d_cl=%g', d_qm,
                    report.bound, config.closest_approach)
    log.info('d_cl=%g d_qm=%g tau_cl=%g tau_qm=%g (%d regrids)',
             config.closest_approach, d_qm, tau, report.collision_time_quantum,
             propagator.regrids)
    return report


def colliding_packets(config, **solver):
    '''Two identical nuclei launched from -L and +L towards each other.

    ``config`` describes one of the projectiles; its charge is used for
    both.  The relative motion is a single packet of half the mass, twice
    the launch distance and sqrt(2) times the width, so the reported bound
    and optimal width refer to that relative packet.

    '''
    state = core.GaussianState(0.0, config.sigma, config.momentum)
    pair = frames.decompose(frames.BipartiteSpec(
        config.mass, config.mass, state,
        dataclasses.replace(state, momentum=-config.momentum),
        2.0 * config.launch), config.hbar)
    relative = config.replace(
        charge_target=config.charge_projectile,
        mass=pair.reduced_mass,
        launch=2.0 * config.launch,
        kinetic_energy=2.0 * config.kinetic_energy,
        sigma=pair.sigma_rel)
    return quantum_collision(relative, bound=optimal_spread(relative),
                             **solver)
    return report


def dynamical_tunneling(config, dx=DEFAULT_DX, dt=DEFAULT_DT, max_steps=None,
                        stencil=tdse.PENTA, free=False,
                        flux_threshold=FLUX_THRESHOLD,
                        flux_samples=FLUX_SAMPLES):
    '''Probability of finding the packet beyond the barrier cut at long times.

    The run ends once the probability beyond l changes by less than
    ``flux_threshold`` per step for ``flux_samples`` consecutive steps,
    counted from the moment the classical packet would have reached the
    barrier.  ``free`` removes the potential altogether.

    :raises cvqdyn.exceptions.NotConvergedException: if the flux criterion
        is not met within ``max_steps``

    '''
    v_max = (config.momentum + 3.0 * config.hbar / (2.0 * config.sigma)) / \
        config.mass
    if free:
        gate = (config.launch + config.barrier) * config.mass / config.momentum
        potential = None
    else:
        gate = classical_turning_time(config)
        potential = barrier_potential(config, dx)
    if max_steps is None:
        max_steps = int(np.ceil(3.0 * gate / dt))
    t_max = max_steps * dt
    margin = core.WINDOW_SIGMAS * _spread_at(config, t_max)
    lower = -config.launch - margin - max(0.0, v_max * t_max - config.launch)
    upper = config.barrier + v_max * t_max + margin
    grid = core.Grid.from_spacing(lower, dx, int(np.ceil((upper - lower) / dx)) + 1)
    g = core.GaussianState(-config.launch, config.sigma, config.momentum)
    psi = core.make_gaussian(grid, g, config.hbar)

    propagator = tdse.Propagator(potential, config.mass,
                                 tdse.StepperConfig(dt, stencil), config.hbar)
    state = {'previous': 0.0, 'quiet': 0, 'value': 0.0}

    def observe(n, current):
        value = current.probability_beyond(config.barrier, 'right')
        quiet = abs(value - state['previous']) < flux_threshold
        state['quiet'] = state['quiet'] + 1 if quiet and current.time > gate \
            else 0
        state['previous'] = state['value'] = value
        return state['quiet'] < flux_samples

    log.info('tunneling run on %d points, up to %d steps', grid.n_points,
             max_steps)
    propagator.run(psi, max_steps, observe)
    if state['quiet'] < flux_samples:
        raise exceptions.NotConvergedException(
            'flux through x={0:g} still above {1:g} after {2} steps'.format(
                config.barrier, flux_threshold, max_steps))
    return float(np.clip(state['value'], 0.0, 1.0))


def sigma_sweep(config, sigmas, threads=1, **solver):
    '''Rows (sigma, d_qm, d_cl, bound_ok) over initial spreads.'''
    def job(sigma):
        report = quantum_collision(config.replace(sigma=sigma), **solver)
        return (sigma, report.closest_approach_quantum,
                report.closest_approach_classical, report.bound_ok)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, sigmas))
    return [job(sigma) for sigma in sigmas]
