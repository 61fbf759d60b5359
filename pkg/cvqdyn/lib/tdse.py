'''Cayley-form time stepping of the 1-D time-dependent Schroedinger equation.

One step solves ``(1 + i H dt / 2 hbar) psi(t + dt) = (1 - i H dt / 2 hbar) psi(t)``
for the interior grid points.  ``H`` is discretized with the three-point
(``tri``) or five-point (``penta``) second-derivative stencil.  The banded
matrix on the left is factorized once with LAPACK and reused every step; the
right-hand side is a direct stencil product.

The two outermost grid points hold zero amplitude.  Next to them the penta
stencil reads one ghost point past the wall, taken as the odd reflection of
the first interior point.

'''
import dataclasses
import logging
from typing import Callable, Optional

import numpy as np
from scipy.linalg import get_lapack_funcs

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core

log = logging.getLogger(__name__)

TRI = 'tri'
PENTA = 'penta'
STENCILS = (TRI, PENTA)


@dataclasses.dataclass(frozen=True)
class StepperConfig(object):
    dt: float
    stencil: str = PENTA
    boundary: str = 'fixed-zero'

    def __post_init__(self):
        if self.dt == 0:
            raise ValueError('time step must be non-zero')
        if self.stencil not in STENCILS:
            raise ValueError('unknown stencil {0!r}'.format(self.stencil))
        if self.boundary != 'fixed-zero':
            raise ValueError('only fixed-zero boundaries are supported')

    @property
    def derivative_order(self):
        return 3 if self.stencil == TRI else 5


@dataclasses.dataclass(frozen=True)
class PotentialGrid(object):
    values: np.ndarray

    @classmethod
    def zeros(cls, grid):
        return cls(np.zeros(grid.n_points))

    @classmethod
    def from_callable(cls, grid, potential):
        if potential is None:
            return cls.zeros(grid)
        return cls(np.asarray(potential(grid.points), dtype=float)
                   * np.ones(grid.n_points))


class BandedSystem(object):
    '''The factorized implicit matrix for one grid, potential and step.

    ``diagonal`` holds a_j on the interior points (ghost corrections
    included), ``b`` and ``c`` the constant first and second off-diagonals.

    '''
    def __init__(self, grid, potential, mass, dt, stencil, hbar=1.0):
        self.grid = grid
        self.potential = potential
        self.mass = mass
        self.dt = dt
        self.stencil = stencil
        self.hbar = hbar

        dx = grid.dx
        v = potential.values[1:-1]
        factor = 1j * dt / (2.0 * hbar)
        kinetic = hbar ** 2 / (mass * dx ** 2)
        if stencil == TRI:
            self.bandwidth = 1
            self.diagonal = 1.0 + factor * (kinetic + v)
            self.b = -1j * hbar * dt / (4.0 * mass * dx ** 2)
            self.c = 0.0
        else:
            self.bandwidth = 2
            self.diagonal = 1.0 + factor * (1.25 * kinetic + v)
            self.b = -1j * hbar * dt / (3.0 * mass * dx ** 2)
            self.c = 1j * hbar * dt / (48.0 * mass * dx ** 2)
            # odd-reflection ghosts beyond the walls
            self.diagonal[0] -= self.c
            self.diagonal[-1] -= self.c
        self._factorize()

    def _factorize(self):
        n = self.diagonal.size
        k = self.bandwidth
        ab = np.zeros((3 * k + 1, n), dtype=complex)
        # LAPACK band storage: A[i, j] lives at ab[2k + i - j, j]
        ab[2 * k] = self.diagonal
        ab[2 * k - 1, 1:] = self.b
        ab[2 * k + 1, :-1] = self.b
        if k == 2:
            ab[2, 2:] = self.c
            ab[6, :-2] = self.c
        gbtrf, gbtrs = get_lapack_funcs(('gbtrf', 'gbtrs'), (ab,))
        lu, piv, info = gbtrf(ab, k, k)
        if info != 0:
            raise exceptions.SingularFactorizationException(
                'banded LU failed with info={0}'.format(info))
        self._gbtrs = gbtrs
        self._lu = lu
        self._piv = piv
        log.debug('factorized %s system: n=%d dx=%g dt=%g',
                  self.stencil, n, self.grid.dx, self.dt)

    def apply(self, interior):
        '''Multiply the implicit matrix into interior amplitudes.'''
        out = self.diagonal * interior
        out[1:] += self.b * interior[:-1]
        out[:-1] += self.b * interior[1:]
        if self.bandwidth == 2:
            out[2:] += self.c * interior[:-2]
            out[:-2] += self.c * interior[2:]
        return out

    def solve(self, rhs):
        x, info = self._gbtrs(self._lu, self.bandwidth, self.bandwidth,
                              rhs, self._piv)
        if info != 0:
            raise exceptions.SingularFactorizationException(
                'banded solve failed with info={0}'.format(info))
        return x

    def hamiltonian(self, interior):
        '''The discrete Hamiltonian applied to interior amplitudes.'''
        identity_part = self.apply(interior) - interior
        return identity_part * (2.0 * self.hbar / (1j * self.dt))

    def energy(self, psi):
        interior = psi.amplitudes[1:-1]
        h = self.hamiltonian(interior)
        value = np.sum(np.conj(interior) * h).real * self.grid.dx
        return value / psi.norm()


def build_system(grid, potential, mass, dt, stencil=PENTA, hbar=1.0):
    '''Return the factorized :class:`BandedSystem` for one step size.

    :raises cvqdyn.exceptions.SingularFactorizationException: if LAPACK
        reports a zero pivot

    '''
    if potential is None:
        potential = PotentialGrid.zeros(grid)
    if len(potential.values) != grid.n_points:
        raise exceptions.GridMismatchException(
            'potential has {0} values for a grid of {1} points'.format(
                len(potential.values), grid.n_points))
    return BandedSystem(grid, potential, mass, dt, stencil, hbar)


def step(system, psi):
    '''Advance ``psi`` by one Cayley step.'''
    if not system.grid.same_as(psi.grid):
        raise exceptions.GridMismatchException(
            'wave function grid differs from the system grid')
    interior = psi.amplitudes[1:-1]
    rhs = 2.0 * interior - system.apply(interior)
    amplitudes = np.zeros_like(psi.amplitudes)
    amplitudes[1:-1] = system.solve(rhs)
    return psi.copy(amplitudes, psi.time + system.dt)


def evolve(psi, system, n_steps, observer=None, cadence=1, energy_hint=None):
    '''Take ``n_steps`` Cayley steps.

    ``observer(step, moment_set)`` is called before the first step and then
    every ``cadence`` steps.

    '''
    order = 3 if system.stencil == TRI else 5
    if observer is not None:
        observer(0, core.moments(psi, energy_hint, order))
    for n in range(1, n_steps + 1):
        psi = step(system, psi)
        if observer is not None and n % cadence == 0:
            observer(n, core.moments(psi, energy_hint, order))
    return psi


@dataclasses.dataclass(frozen=True)
class RegridPolicy(object):
    margin_sigmas: float = core.WINDOW_SIGMAS
    tail_fraction: float = 0.05
    tail_threshold: float = 1e-8
    truncation_tolerance: float = 1e-6
    # new half-width relative to the bare seven-sigma requirement
    expansion: float = 1.5
    check_every: int = 10


def needs_regrid(psi, policy):
    grid = psi.grid
    norm, mean, spread = core.position_stats(psi)
    if min(mean - grid.x_min, grid.x_max - mean) < policy.margin_sigmas * spread:
        return True
    edge = policy.tail_fraction * grid.length
    tail = (psi.probability_beyond(grid.x_max - edge, 'right') +
            psi.probability_beyond(grid.x_min + edge, 'left'))
    return tail / norm > policy.tail_threshold


def regrid(psi, policy=RegridPolicy()):
    '''Move ``psi`` onto a grid recentred at its mean position.

    The spacing is kept and the new nodes are aligned with the old ones, so
    amplitudes carried over are exact; nodes outside the old grid get zero.
    The half-width never shrinks and is at least ``margin_sigmas`` spreads.

    :raises cvqdyn.exceptions.TailTruncationException: if more than
        ``truncation_tolerance`` of the probability would be lost

    '''
    grid = psi.grid
    dx = grid.dx
    norm, mean, spread = core.position_stats(psi)
    old_half = (grid.n_points - 1) // 2
    needed = int(np.ceil(policy.expansion * policy.margin_sigmas * spread / dx))
    n_half = max(old_half, needed)
    center_index = int(round((mean - grid.x_min) / dx))
    old_center_index = old_half
    if n_half == old_half and center_index == old_center_index and \
            grid.n_points == 2 * old_half + 1:
        return psi

    center = grid.x_min + center_index * dx
    new_grid = core.Grid.from_spacing(center - n_half * dx, dx, 2 * n_half + 1)
    amplitudes = psi.evaluate(new_grid.points)
    amplitudes[0] = amplitudes[-1] = 0.0
    moved = psi.copy(amplitudes, grid=new_grid)
    lost = norm - moved.norm()
    if lost > policy.truncation_tolerance:
        raise exceptions.TailTruncationException(
            'regrid would discard {0:.3g} of the probability'.format(lost))
    log.debug('regrid at t=%g: [%g, %g] -> [%g, %g]', psi.time, grid.x_min,
              grid.x_max, new_grid.x_min, new_grid.x_max)
    return moved.normalized()


class Propagator(object):
    '''Evolves a wave function in a static potential, regridding as needed.

    :param potential: V(x) as a vectorized callable, or ``None`` for free motion
    :param mass: the particle mass
    :param config: step size and stencil
    :type config: :class:`StepperConfig`
    :param policy: when and how to regrid, ``None`` keeps the grid fixed
    :type policy: :class:`RegridPolicy`

    '''
    def __init__(self, potential: Optional[Callable], mass, config,
                 hbar=1.0, policy=None):
        self.potential = potential
        self.mass = mass
        self.config = config
        self.hbar = hbar
        self.policy = policy
        self.system = None
        self.regrids = 0

    def system_for(self, grid):
        if self.system is None or not self.system.grid.same_as(grid):
            self.system = build_system(
                grid, PotentialGrid.from_callable(grid, self.potential),
                self.mass, self.config.dt, self.config.stencil, self.hbar)
        return self.system

    def energy(self, psi):
        return self.system_for(psi.grid).energy(psi)

    def moments(self, psi, energy_hint=None):
        return core.moments(psi, energy_hint, self.config.derivative_order)

    def run(self, psi, n_steps, observer=None, cadence=1):
        '''Take ``n_steps`` steps; ``observer(step, psi)`` sees every
        ``cadence``-th state, starting with the initial one.

        '''
        if observer is not None:
            observer(0, psi)
        for n in range(1, n_steps + 1):
            psi = step(self.system_for(psi.grid), psi)
            if self.policy is not None and n % self.policy.check_every == 0 \
                    and needs_regrid(psi, self.policy):
                psi = regrid(psi, self.policy)
                self.regrids += 1
            if observer is not None and n % cadence == 0:
                if observer(n, psi) is False:
                    break
        return psi


def convergence_order(spacings, errors):
    '''Slope of log(error) against log(spacing).'''
    slope, _ = np.polyfit(np.log(spacings), np.log(np.abs(errors)), 1)
    return slope
