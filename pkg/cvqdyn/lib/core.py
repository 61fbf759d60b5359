'''Grids, wave functions and the statistical moments read off them.

Everything here is shared by the propagators and the entanglement
pipelines.  Integrals use the composite trapezoid rule on the uniform grid
and first derivatives use central differences of the same order as the
active stencil (3 or 5 points), with the boundary amplitudes taken as zero.

'''
import dataclasses
import logging
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

import cvqdyn.exceptions as exceptions

log = logging.getLogger(__name__)

WINDOW_SIGMAS = 7.0
NORM_TOLERANCE = 1e-3
SHORTCUT_TOLERANCE = 1e-4


@dataclasses.dataclass(frozen=True)
class Grid(object):
    '''Uniform 1-D grid including both end points.'''
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 7:
            raise ValueError('a grid needs at least 7 points, got {0}'
                             .format(self.n_points))
        if not self.x_max > self.x_min:
            raise ValueError('x_max must exceed x_min')

    @classmethod
    def from_spacing(cls, x_min, dx, n_points):
        return cls(float(x_min), float(x_min + dx * (n_points - 1)),
                   int(n_points))

    @classmethod
    def centered(cls, center, half_width, dx):
        n_half = int(np.ceil(half_width / dx))
        return cls.from_spacing(center - n_half * dx, dx, 2 * n_half + 1)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def length(self):
        return self.x_max - self.x_min

    def contains(self, lower, upper):
        return lower >= self.x_min and upper <= self.x_max

    def same_as(self, other, rtol=1e-12):
        scale = max(abs(self.x_min), abs(self.x_max), self.dx)
        return (self.n_points == other.n_points and
                abs(self.x_min - other.x_min) <= rtol * scale and
                abs(self.x_max - other.x_max) <= rtol * scale)


@dataclasses.dataclass(frozen=True)
class GaussianState(object):
    '''Minimum-uncertainty Gaussian: centre, position spread and momentum.'''
    center: float
    width: float
    momentum: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError('Gaussian width must be positive')


@dataclasses.dataclass
class MomentSet(object):
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float
    skewness: float = 0.0
    # <p^2> - <p>^2 from the energy-conservation shortcut, when requested
    var_p_shortcut: Optional[float] = None
    shortcut_mismatch: bool = False

    @property
    def spread_x(self):
        return np.sqrt(self.var_x)

    @property
    def spread_p(self):
        return np.sqrt(self.var_p)

    @property
    def uncertainty_product(self):
        return np.sqrt(self.var_x * self.var_p)

    def satisfies_uncertainty(self, hbar=1.0, rtol=1e-9):
        return self.uncertainty_product >= 0.5 * hbar * (1.0 - rtol)


@dataclasses.dataclass(frozen=True)
class EnergyHint(object):
    '''What the energy shortcut for <p^2> needs to know.

    ``potential`` holds V on the wave function's grid and
    ``initial_potential_mean`` the value of <V> for the initial Gaussian.

    '''
    initial: GaussianState
    mass: float
    potential: np.ndarray
    initial_potential_mean: float


class WaveFunction(object):
    '''Complex amplitudes sampled on a :class:`Grid` at a given time.

    The two boundary amplitudes are treated as zero by every operation.

    '''
    def __init__(self, grid, amplitudes, time=0.0, hbar=1.0):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (grid.n_points,):
            raise exceptions.GridMismatchException(
                'amplitudes of shape {0} do not match a grid of {1} points'
                .format(amplitudes.shape, grid.n_points))
        self.grid = grid
        self.amplitudes = amplitudes
        self.time = float(time)
        self.hbar = float(hbar)

    def __repr__(self):
        return 'WaveFunction(t={0:g}, n_points={1})'.format(
            self.time, self.grid.n_points)

    def copy(self, amplitudes=None, time=None, grid=None):
        return WaveFunction(
            self.grid if grid is None else grid,
            self.amplitudes.copy() if amplitudes is None else amplitudes,
            self.time if time is None else time,
            self.hbar)

    def density(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        return trapezoid(self.density(), dx=self.grid.dx)

    def normalized(self):
        return self.copy(self.amplitudes / np.sqrt(self.norm()))

    def evaluate(self, points):
        '''Interpolate the amplitudes at arbitrary points, zero outside.'''
        points = np.asarray(points, dtype=float)
        x = self.grid.points
        real = CubicSpline(x, self.amplitudes.real, extrapolate=False)
        imag = CubicSpline(x, self.amplitudes.imag, extrapolate=False)
        values = real(points) + 1j * imag(points)
        return np.nan_to_num(values, nan=0.0)

    def probability_beyond(self, x0, side='right'):
        x = self.grid.points
        rho = self.density()
        mask = x >= x0 if side == 'right' else x <= x0
        if mask.sum() < 2:
            return 0.0
        return trapezoid(rho[mask], x[mask])


def make_gaussian(grid, g, hbar=1.0, time=0.0):
    '''Sample a normalized Gaussian wave packet on ``grid``.

    :param grid: the grid to sample on
    :type grid: :class:`Grid`
    :param g: centre, width and momentum of the packet
    :type g: :class:`GaussianState`

    :rtype: :class:`WaveFunction`

    :raises cvqdyn.exceptions.GridTooNarrowException: if the packet's
        seven-sigma window does not fit inside the grid

    '''
    lower = g.center - WINDOW_SIGMAS * g.width
    upper = g.center + WINDOW_SIGMAS * g.width
    if not grid.contains(lower, upper):
        raise exceptions.GridTooNarrowException(
            'window [{0:g}, {1:g}] leaves grid [{2:g}, {3:g}]'.format(
                lower, upper, grid.x_min, grid.x_max))
    x = grid.points - g.center
    envelope = (2.0 * np.pi * g.width ** 2) ** -0.25 * np.exp(
        -x ** 2 / (4.0 * g.width ** 2))
    amplitudes = envelope * np.exp(1j * g.momentum * x / hbar)
    amplitudes[0] = amplitudes[-1] = 0.0
    psi = WaveFunction(grid, amplitudes, time, hbar)
    return psi.normalized()


def derivative(amplitudes, dx, order=5):
    '''Central first derivative with zero amplitudes beyond the ends.'''
    f = np.pad(np.asarray(amplitudes), 2)
    if order == 3:
        return (f[3:-1] - f[1:-3]) / (2.0 * dx)
    if order == 5:
        return (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * dx)
    raise ValueError('derivative order must be 3 or 5, got {0}'.format(order))


def moments(psi, energy_hint=None, order=5):
    '''Return the first and second moments of ``psi`` and its skewness.

    ``<p>`` and ``<p^2>`` come from first-derivative quadratures.  With an
    ``energy_hint`` the variance of ``p`` is also estimated from energy
    conservation, ``<p^2> = p0^2 + hbar^2/4 sigma^2 + 2m(<V>_0 - <V>)``, and
    the result is flagged when the two estimates disagree by more than
    1e-4 relative.

    :raises cvqdyn.exceptions.NotNormalizedException: if the norm of
        ``psi`` is off by more than 1e-3

    '''
    norm = psi.norm()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise exceptions.NotNormalizedException(
            'norm is {0:.6g}'.format(norm))
    hbar = psi.hbar
    dx = psi.grid.dx
    x = psi.grid.points
    amp = psi.amplitudes
    rho = psi.density() / norm
    dpsi = derivative(amp, dx, order)

    mean_x = trapezoid(x * rho, dx=dx)
    var_x = trapezoid((x - mean_x) ** 2 * rho, dx=dx)
    third = trapezoid((x - mean_x) ** 3 * rho, dx=dx)

    overlap = trapezoid(np.conj(amp) * dpsi, dx=dx) / norm
    mean_p = hbar * overlap.imag
    mean_p2 = hbar ** 2 * trapezoid(np.abs(dpsi) ** 2, dx=dx) / norm
    sym_xp = hbar * trapezoid(np.conj(amp) * x * dpsi, dx=dx).imag / norm

    result = MomentSet(
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=var_x,
        var_p=mean_p2 - mean_p ** 2,
        cov_xp=sym_xp - mean_x * mean_p,
        skewness=third / var_x ** 1.5 if var_x > 0 else 0.0,
    )

    if energy_hint is not None:
        g = energy_hint.initial
        mean_v = trapezoid(rho * energy_hint.potential, dx=dx)
        shortcut = (g.momentum ** 2 + hbar ** 2 / (4.0 * g.width ** 2) +
                    2.0 * energy_hint.mass *
                    (energy_hint.initial_potential_mean - mean_v))
        result.var_p_shortcut = shortcut - mean_p ** 2
        if abs(shortcut - mean_p2) > SHORTCUT_TOLERANCE * abs(mean_p2):
            result.shortcut_mismatch = True
            log.warning('<p^2> estimates disagree at t=%g: %g vs %g',
                        psi.time, mean_p2, shortcut)
    return result


def analytic_free_uncertainty(t, sigma, mass, hbar=1.0):
    '''Position-momentum uncertainty product of a freely spreading Gaussian.'''
    omega0 = hbar / (2.0 * mass * sigma ** 2)
    return 0.5 * hbar * np.sqrt(1.0 + (omega0 * t) ** 2)


def analytic_ho_uncertainty(t, sigma, mass, omega, hbar=1.0):
    '''Uncertainty product of a Gaussian of width ``sigma`` released in a
    harmonic trap of frequency ``omega``.

    '''
    omega0 = hbar / (2.0 * mass * sigma ** 2)
    c = np.cos(omega * t)
    s = np.sin(omega * t)
    ratio = omega0 ** 2 / omega ** 2 + omega ** 2 / omega0 ** 2
    return 0.5 * hbar * np.sqrt(c ** 4 + s ** 4 +
                                0.25 * ratio * np.sin(2.0 * omega * t) ** 2)


def box_eigenstate(grid, n, hbar=1.0):
    '''The n-th (n >= 1) hard-wall eigenstate of the box spanned by ``grid``.

    On the grid this is also an exact eigenvector of the discrete
    Laplacians used by the propagators.

    '''
    if n < 1:
        raise ValueError('box quantum number starts at 1')
    x = grid.points
    amplitudes = np.sin(n * np.pi * (x - grid.x_min) / grid.length)
    amplitudes[0] = amplitudes[-1] = 0.0
    return WaveFunction(grid, amplitudes, 0.0, hbar).normalized()


def position_stats(psi):
    '''Norm, mean position and position spread from the density alone.'''
    x = psi.grid.points
    rho = psi.density()
    norm = trapezoid(rho, x)
    mean = trapezoid(x * rho, x) / norm
    spread = np.sqrt(trapezoid((x - mean) ** 2 * rho, x) / norm)
    return norm, mean, spread


def free_gaussian(grid, g, mass, t, hbar=1.0):
    '''Closed-form free evolution of the Gaussian ``g`` to time ``t``.

    The packet is the Galilean boost of a spreading packet at rest, so its
    centre moves with ``g.momentum / mass``.

    '''
    omega = hbar / (2.0 * mass * g.width ** 2)
    spreading = 1.0 + 1j * omega * t
    x = grid.points - g.center
    k = g.momentum / hbar
    drift = x - g.momentum * t / mass
    amplitudes = ((2.0 * np.pi * g.width ** 2) ** -0.25 / np.sqrt(spreading) *
                  np.exp(-drift ** 2 / (4.0 * g.width ** 2 * spreading) +
                         1j * k * x - 1j * hbar * k ** 2 * t / (2.0 * mass)))
    amplitudes[0] = amplitudes[-1] = 0.0
    return WaveFunction(grid, amplitudes, t, hbar)
