'''Centre-of-mass and relative coordinates for two Gaussian particles.

With R = (m_A x_A + m_B x_B)/M and r = x_B - x_A a LAB product of two
minimum-uncertainty Gaussians stays a product in (R, r) exactly when
m_A sigma_A**2 == m_B sigma_B**2.  Central interactions then leave the
COM free (or trapped) and all the dynamics sits in the relative mode.

'''
import dataclasses
import logging

import numpy as np

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core

log = logging.getLogger(__name__)

SEPARABILITY_TOLERANCE = 1e-9
ASSEMBLY_TOLERANCE = 1e-4


@dataclasses.dataclass(frozen=True)
class BipartiteSpec(object):
    mass_a: float
    mass_b: float
    state_a: core.GaussianState
    state_b: core.GaussianState
    separation: float

    def __post_init__(self):
        if not (self.mass_a > 0 and self.mass_b > 0):
            raise ValueError('masses must be positive')
        if not self.separation > 0:
            raise ValueError('separation must be positive')

    @classmethod
    def identical(cls, mass, sigma, separation, momentum=0.0):
        '''Two equal Gaussians at rest in their traps, approaching each
        other with momenta +momentum (A) and -momentum (B).

        '''
        return cls(mass, mass,
                   core.GaussianState(0.0, sigma, momentum),
                   core.GaussianState(0.0, sigma, -momentum),
                   separation)


@dataclasses.dataclass(frozen=True)
class ComDecomposition(object):
    total_mass: float
    reduced_mass: float
    sigma_com: float
    sigma_rel: float
    center_com: float
    center_rel: float
    momentum_com: float
    momentum_rel: float
    omega0: float
    mass_a: float
    mass_b: float
    hbar: float = 1.0

    @property
    def com_state(self):
        return core.GaussianState(self.center_com, self.sigma_com,
                                  self.momentum_com)

    @property
    def rel_state(self):
        return core.GaussianState(self.center_rel, self.sigma_rel,
                                  self.momentum_rel)


def decompose(spec, hbar=1.0):
    '''Split a LAB product of Gaussians into its COM and relative Gaussians.

    :raises cvqdyn.exceptions.NotSeparableException: if
        m_A sigma_A**2 and m_B sigma_B**2 differ by more than 1e-9 relative

    '''
    a = spec.mass_a * spec.state_a.width ** 2
    b = spec.mass_b * spec.state_b.width ** 2
    if abs(a - b) / a > SEPARABILITY_TOLERANCE:
        raise exceptions.NotSeparableException(
            'm_A sigma_A^2 = {0:.6g} but m_B sigma_B^2 = {1:.6g}'.format(a, b))
    total = spec.mass_a + spec.mass_b
    reduced = spec.mass_a * spec.mass_b / total
    omega0 = hbar / (2.0 * a)
    g_a, g_b = spec.state_a, spec.state_b
    return ComDecomposition(
        total_mass=total,
        reduced_mass=reduced,
        sigma_com=np.sqrt(hbar / (2.0 * total * omega0)),
        sigma_rel=np.sqrt(hbar / (2.0 * reduced * omega0)),
        center_com=(spec.mass_a * g_a.center + spec.mass_b * g_b.center) / total,
        center_rel=g_b.center - g_a.center,
        momentum_com=g_a.momentum + g_b.momentum,
        momentum_rel=(spec.mass_a * g_b.momentum -
                      spec.mass_b * g_a.momentum) / total,
        omega0=omega0,
        mass_a=spec.mass_a,
        mass_b=spec.mass_b,
        hbar=hbar,
    )


def inverse_transform(dec, com, rel, com_momentum, rel_momentum):
    '''Map (R, r, P, p) back to (x_A, x_B, p_A, p_B).'''
    frac_a = dec.mass_a / dec.total_mass
    frac_b = dec.mass_b / dec.total_mass
    return (com - frac_b * rel,
            com + frac_a * rel,
            frac_a * com_momentum - rel_momentum,
            frac_b * com_momentum + rel_momentum)


def com_free_moments(dec, t):
    '''Exact moments of the freely spreading COM packet at time ``t``.'''
    w = dec.omega0
    return core.MomentSet(
        mean_x=dec.center_com + dec.momentum_com * t / dec.total_mass,
        mean_p=dec.momentum_com,
        var_x=dec.sigma_com ** 2 * (1.0 + (w * t) ** 2),
        var_p=dec.hbar ** 2 / (4.0 * dec.sigma_com ** 2),
        cov_xp=0.5 * dec.hbar * w * t,
    )


def com_trapped_moments(dec):
    '''Moments of the COM ground state in the traps; constant in time.'''
    return core.MomentSet(
        mean_x=dec.center_com,
        mean_p=dec.momentum_com,
        var_x=dec.sigma_com ** 2,
        var_p=dec.hbar ** 2 / (4.0 * dec.sigma_com ** 2),
        cov_xp=0.0,
    )


def com_wavefunction(dec, grid, t=0.0, trapped=False):
    if trapped:
        psi = core.make_gaussian(grid, dec.com_state, dec.hbar)
        return psi.copy(time=t)
    return core.free_gaussian(grid, dec.com_state, dec.total_mass, t, dec.hbar)


def relative_wavefunction(dec, grid):
    return core.make_gaussian(grid, dec.rel_state, dec.hbar)


@dataclasses.dataclass
class TwoBodyState(object):
    amplitudes: np.ndarray
    grid_a: core.Grid
    grid_b: core.Grid

    def norm(self):
        return np.sum(np.abs(self.amplitudes) ** 2) * self.grid_a.dx * self.grid_b.dx


def _lab_grid(mean, spread, dx, max_points):
    half = core.WINDOW_SIGMAS * spread
    dx = max(dx, 2.0 * half / (max_points - 1))
    return core.Grid.centered(mean, half, dx)


def assemble_two_body(phi, psi, mass_a, mass_b, grid_a=None, grid_b=None,
                      max_points=801):
    '''Build Psi(x_A, x_B) = phi(R) psi(r) on a LAB tensor grid.

    ``phi`` is the COM wave function and ``psi`` the relative one.  When
    the LAB grids are not given they cover seven spreads of each marginal
    with the finer of the two input spacings.

    :raises cvqdyn.exceptions.SupportClippedException: if the 2-D norm is
        off by more than 1e-4

    '''
    total = mass_a + mass_b
    frac_a, frac_b = mass_a / total, mass_b / total
    if grid_a is None or grid_b is None:
        _, mean_R, spread_R = core.position_stats(phi)
        _, mean_r, spread_r = core.position_stats(psi)
        dx = min(phi.grid.dx, psi.grid.dx)
        spread_a = np.hypot(spread_R, frac_b * spread_r)
        spread_b = np.hypot(spread_R, frac_a * spread_r)
        grid_a = grid_a or _lab_grid(mean_R - frac_b * mean_r, spread_a, dx,
                                     max_points)
        grid_b = grid_b or _lab_grid(mean_R + frac_a * mean_r, spread_b, dx,
                                     max_points)
    xa, xb = np.meshgrid(grid_a.points, grid_b.points, indexing='ij')
    com = frac_a * xa + frac_b * xb
    rel = xb - xa
    amplitudes = (phi.evaluate(com.ravel()) *
                  psi.evaluate(rel.ravel())).reshape(xa.shape)
    state = TwoBodyState(amplitudes, grid_a, grid_b)
    norm = state.norm()
    if abs(norm - 1.0) > ASSEMBLY_TOLERANCE:
        raise exceptions.SupportClippedException(
            '2-D norm is {0:.6g}'.format(norm))
    log.debug('assembled two-body state on %dx%d grid, norm %.8f',
              grid_a.n_points, grid_b.n_points, norm)
    return state
