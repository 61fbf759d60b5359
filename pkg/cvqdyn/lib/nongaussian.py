'''Numeric entanglement beyond the quadratic truncation.

The relative wave function is evolved under the order-N expansion of the
interaction, recombined with the analytic COM packet, and measured two ways:
through the covariance matrix of its moments (negativity, Gaussian entropy)
and through the Schmidt spectrum of the sampled two-body amplitude.

'''
import concurrent.futures
import dataclasses
import logging
from typing import List

import numpy as np
from scipy.linalg import svdvals
from scipy.special import xlogy

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core
import cvqdyn.lib.frames as frames
import cvqdyn.lib.gaussian as gaussian
import cvqdyn.lib.potentials as potentials
import cvqdyn.lib.tdse as tdse

log = logging.getLogger(__name__)

SCHMIDT_TOLERANCE = 1e-7
PROVENANCES = ('closed_form', 'numeric_N2', 'numeric_N3', 'numeric_N4',
               'predicted')


@dataclasses.dataclass
class SchmidtResult(object):
    coefficients: np.ndarray
    rank: int
    captured_norm: float


@dataclasses.dataclass
class EntanglementSeries(object):
    times: np.ndarray
    negativity: np.ndarray
    entropy: np.ndarray
    skewness: np.ndarray
    provenance: str
    entropy_covariance: np.ndarray = None
    mean_p: np.ndarray = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError('time stamps must increase')


@dataclasses.dataclass
class ReducedEvolution(object):
    snapshots: List[core.WaveFunction]
    expansion: potentials.ExpansionCoeffs
    regrids: int = 0

    @property
    def times(self):
        return np.array([psi.time for psi in self.snapshots])


def evolve_reduced(spec, order, g_rel, reduced_mass, t_end, dt, dx=None,
                   grid=None, cadence=1, stencil=tdse.PENTA, hbar=1.0,
                   policy=tdse.RegridPolicy()):
    '''Evolve the relative wave function under the order-``order``
    expansion of ``spec`` and keep every ``cadence``-th state.

    The constant part of the expansion is dropped.  Without an explicit
    ``grid`` the run starts on a box of 1.5 times seven spreads around the
    packet and regrids as it spreads or drifts.

    '''
    if order < 2:
        raise ValueError('expansion order must be at least 2')
    expansion = potentials.expand(spec, order)
    if grid is None:
        dx = dx or g_rel.width / 20.0
        grid = core.Grid.centered(
            g_rel.center, policy.expansion * core.WINDOW_SIGMAS * g_rel.width, dx)
    psi = core.make_gaussian(grid, g_rel, hbar)
    propagator = tdse.Propagator(expansion.evaluate, reduced_mass,
                                 tdse.StepperConfig(dt, stencil), hbar, policy)
    snapshots = []
    n_steps = int(round(t_end / dt))
    propagator.run(psi, n_steps, lambda n, state: snapshots.append(state),
                   cadence)
    log.info('evolved order-%d %s interaction to t=%g in %d steps (%d regrids)',
             order, spec.kind, t_end, n_steps, propagator.regrids)
    return ReducedEvolution(snapshots, expansion, propagator.regrids)


def relative_moments_from_wavefunction(psi, order=5):
    return gaussian.RelativeMoments.from_moment_set(
        core.moments(psi, order=order), psi.time)


def covariance_from_wavefunctions(com, rel, hbar=1.0):
    '''Covariance matrix from analytic COM moments and the moments of a
    numerically evolved relative wave function.

    '''
    if isinstance(rel, core.WaveFunction):
        rel = relative_moments_from_wavefunction(rel)
    return gaussian.assemble_covariance(com, rel, hbar)


def schmidt_entropy(amplitudes, dx_a, dx_b, tolerance=SCHMIDT_TOLERANCE,
                    norm_tolerance=frames.ASSEMBLY_TOLERANCE):
    '''Entanglement entropy of a sampled two-body amplitude.

    The grid measure is folded into the matrix as sqrt(dx_A dx_B); the
    squared singular values are normalized to unit sum and kept up to the
    smallest rank that holds 1 - ``tolerance`` of it.

    :returns: ``(entropy, SchmidtResult)``

    '''
    weighted = np.asarray(amplitudes) * np.sqrt(dx_a * dx_b)
    spectrum = svdvals(weighted) ** 2
    total = spectrum.sum()
    if abs(total - 1.0) > norm_tolerance:
        raise exceptions.SupportClippedException(
            'two-body norm is {0:.6g}'.format(total))
    spectrum = spectrum / total
    cumulative = np.cumsum(spectrum)
    rank = int(np.searchsorted(cumulative, 1.0 - tolerance)) + 1
    if rank > spectrum.size:
        raise exceptions.RankExhaustedException(
            'full rank {0} holds only {1:.10f}'.format(spectrum.size,
                                                        cumulative[-1]))
    kept = spectrum[:rank]
    entropy = -np.sum(xlogy(kept, kept)) / gaussian.LN2
    return max(float(entropy), 0.0), SchmidtResult(kept, rank, float(kept.sum()))


def predict_amplified(baseline, epsilon3, measure='entropy'):
    '''Force-gradient estimate of third-order entanglement:
    S = (1 + eps3) S0 and E = (1 + eps3/2) E0.

    '''
    baseline = np.asarray(baseline, dtype=float)
    epsilon3 = np.asarray(epsilon3, dtype=float)
    if measure == 'entropy':
        return (1.0 + epsilon3) * baseline
    if measure == 'negativity':
        return (1.0 + 0.5 * epsilon3) * baseline
    raise ValueError('measure must be entropy or negativity')


def momentum_witness(mean_p, dt, threshold=1e-3):
    '''The ratio (1/<p>) d^2<p>/dt^2 along a uniformly sampled series.

    Second derivatives are Richardson-refined central differences, so the
    first and last two samples have no ratio.  Under a purely quadratic
    interaction the ratio is the constant omega**2.

    :returns: ``(indices, ratio)``

    :raises cvqdyn.exceptions.ZeroMomentumCrossingException: if |<p>|
        drops below ``threshold`` times its initial value (or its largest
        value when it starts at zero)

    '''
    p = np.asarray(mean_p, dtype=float)
    if p.size < 5:
        raise ValueError('the witness needs at least five samples')
    reference = abs(p[0]) if p[0] != 0 else np.max(np.abs(p))
    if reference == 0 or np.any(np.abs(p) < threshold * reference):
        raise exceptions.ZeroMomentumCrossingException(
            '<p> passes within {0:g} of zero'.format(threshold * reference))
    i = np.arange(2, p.size - 2)
    fine = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / dt ** 2
    coarse = (p[i + 2] - 2.0 * p[i] + p[i - 2]) / (4.0 * dt ** 2)
    return i, (4.0 * fine - coarse) / (3.0 * p[i])


def _measure(dec, psi, trapped, schmidt, max_points):
    t = psi.time
    rel_moments = core.moments(psi)
    if trapped:
        com = frames.com_trapped_moments(dec)
    else:
        com = frames.com_free_moments(dec, t)
    cm = gaussian.assemble_covariance(com, rel_moments, dec.hbar)
    negativity = gaussian.log_negativity(cm)
    entropy_cov = gaussian.entropy_from_covariance(cm)
    entropy = entropy_cov
    if schmidt:
        half = (tdse.RegridPolicy.expansion * core.WINDOW_SIGMAS *
                np.sqrt(com.var_x))
        com_grid = core.Grid.centered(com.mean_x, half, psi.grid.dx)
        phi = frames.com_wavefunction(dec, com_grid, t, trapped)
        state = frames.assemble_two_body(phi, psi, dec.mass_a, dec.mass_b,
                                         max_points=max_points)
        entropy, _ = schmidt_entropy(state.amplitudes, state.grid_a.dx,
                                     state.grid_b.dx)
    return (negativity, entropy, entropy_cov, rel_moments.skewness,
            rel_moments.mean_p)


def entanglement_series(spec, order, sigma, p0, t_end, dt, cadence=1,
                        dx=None, stencil=tdse.PENTA, hbar=1.0, boost=0.0,
                        trapped=False, schmidt=True, threads=1,
                        max_points=801):
    '''Negativity, entropy and skewness of two identical particles whose
    relative motion is evolved numerically.

    Particle A starts with momentum ``p0`` and B with ``-p0``; ``boost``
    adds a common velocity to both.

    '''
    mass = spec.mass
    bipartite = frames.BipartiteSpec(
        mass, mass,
        core.GaussianState(0.0, sigma, p0 + mass * boost),
        core.GaussianState(0.0, sigma, -p0 + mass * boost),
        spec.separation)
    dec = frames.decompose(bipartite, hbar)
    evolution = evolve_reduced(spec, order, dec.rel_state, dec.reduced_mass,
                               t_end, dt, dx=dx, cadence=cadence,
                               stencil=stencil, hbar=hbar)
    snapshots = evolution.snapshots

    def job(psi):
        return _measure(dec, psi, trapped, schmidt, max_points)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, snapshots))
    else:
        rows = [job(psi) for psi in snapshots]
    rows = np.array(rows)
    return EntanglementSeries(
        times=evolution.times,
        negativity=rows[:, 0],
        entropy=rows[:, 1],
        skewness=rows[:, 3],
        provenance='numeric_N{0}'.format(order),
        entropy_covariance=rows[:, 2],
        mean_p=rows[:, 4],
    )
