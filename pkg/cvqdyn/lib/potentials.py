'''Central interactions between two identical masses a distance L apart.

Every interaction is written as a function of the deviation r from the
baseline separation, V(L + r) = sum_n c_n r**n, for the reduced-mass
Hamiltonian H = p**2/m + V(r).  Two families cover all kinds:

* a power-law potential V = -C / (X + r)**j (Newtonian, Coulomb, Casimir),
* a power-law force |F| = C / (X + r)**j, attractive (MOND uses j = 1).

The Gaussian-regime frequency is omega**2 = -4 c_2 / m; a negative c_2
pulls the pair together (hyperbolic growth of correlations), a positive one
pushes it apart and the closed forms go over to their trigonometric versions.

'''
import abc
import dataclasses
import logging
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial
from scipy.special import binom, gamma

import cvqdyn.exceptions as exceptions
from cvqdyn.lib.units import CONSTANTS, sphere_mass

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class OmegaSquared(object):
    value: float
    attractive: bool

    @property
    def omega(self):
        return np.sqrt(self.value)


@dataclasses.dataclass(frozen=True)
class ExpansionCoeffs(object):
    '''Coefficients c_0..c_N of V(L + r) in powers of r.

    The constant c_0 is only an energy offset; propagation drops it.

    '''
    order: int
    coefficients: np.ndarray

    def evaluate(self, r, drop_constant=True):
        coeffs = np.array(self.coefficients, dtype=float)
        if drop_constant:
            coeffs[0] = 0.0
        return polynomial.polyval(np.asarray(r, dtype=float), coeffs)

    def __call__(self, r):
        return self.evaluate(r)


class CentralPotentialSpec(abc.ABC):
    '''A central interaction between two particles of mass ``mass``.'''
    mass: float
    separation: float

    @abc.abstractmethod
    def coefficient(self, n):
        '''The coefficient of r**n in V(L + r).'''

    @abc.abstractmethod
    def potential(self, r):
        '''Exact V(L + r), including its constant part.'''

    @property
    def kind(self):
        return type(self).__name__


def _potential_coefficient(strength, offset, power, n):
    return -strength * (-1) ** n * binom(power + n - 1, n) / offset ** (power + n)


def _force_coefficient(strength, offset, power, n):
    if n == 0:
        if power == 1:
            return strength * np.log(offset)
        return -strength / ((power - 1) * offset ** (power - 1))
    return (strength * (-1) ** (n - 1) * binom(power + n - 2, n - 1) /
            (n * offset ** (power + n - 1)))


@dataclasses.dataclass(frozen=True)
class GenericPotential(CentralPotentialSpec):
    '''V = -C / (X + r)**j; C < 0 describes a repulsion.'''
    strength: float
    offset: float
    power: int
    mass: float
    separation: float = None

    def __post_init__(self):
        if self.separation is None:
            object.__setattr__(self, 'separation', self.offset)

    def coefficient(self, n):
        return _potential_coefficient(self.strength, self.offset, self.power, n)

    def potential(self, r):
        return -self.strength / (self.offset + np.asarray(r)) ** self.power


@dataclasses.dataclass(frozen=True)
class GenericForce(CentralPotentialSpec):
    '''Attractive force of magnitude C / (X + r)**j, i.e. dV/dr = C/(X + r)**j.'''
    strength: float
    offset: float
    power: int
    mass: float
    separation: float = None

    def __post_init__(self):
        if self.separation is None:
            object.__setattr__(self, 'separation', self.offset)

    def coefficient(self, n):
        return _force_coefficient(self.strength, self.offset, self.power, n)

    def potential(self, r):
        x = self.offset + np.asarray(r)
        if self.power == 1:
            return self.strength * np.log(x)
        return -self.strength / ((self.power - 1) * x ** (self.power - 1))


class Newtonian(GenericPotential):
    '''Newtonian gravity, V = -G m**2 / (L + r).'''
    def __init__(self, mass, separation, newton_G=CONSTANTS.newton_G):
        super(Newtonian, self).__init__(newton_G * mass ** 2, separation, 1,
                                        mass, separation)


class Coulomb(GenericPotential):
    '''Coulomb repulsion of two charges (in units of e), V = +k / (L + r)
    with k = q1 q2 alpha hbar c.

    '''
    def __init__(self, charge_1, charge_2, separation, mass,
                 hbar_c=CONSTANTS.hbar_c,
                 alpha=CONSTANTS.fine_structure_alpha):
        k = charge_1 * charge_2 * alpha * hbar_c
        super(Coulomb, self).__init__(-k, separation, 1, mass, separation)

    @property
    def coupling(self):
        return -self.strength


class Casimir(GenericPotential):
    '''Casimir attraction of two spheres of radius R0 in the proximity
    regime, V = -(pi**3 hbar c R0 / 1440) / (L - 2 R0 + r)**2.

    '''
    def __init__(self, radius, separation, mass, hbar_c=None):
        if separation <= 2.0 * radius:
            raise exceptions.ProximityViolatedException(
                'L = {0:g} must exceed 2 R0 = {1:g}'.format(separation,
                                                            2.0 * radius))
        if hbar_c is None:
            hbar_c = CONSTANTS.hbar * CONSTANTS.speed_of_light
        object.__setattr__(self, 'radius', radius)
        super(Casimir, self).__init__(np.pi ** 3 * hbar_c * radius / 1440.0,
                                      separation - 2.0 * radius, 2, mass,
                                      separation)


class Mond(GenericForce):
    '''Deep-MOND attraction of two identical masses,
    V = (4/3)(sqrt(2) - 1) m sqrt(G m a0) ln(L + r).

    '''
    def __init__(self, mass, separation, newton_G=CONSTANTS.newton_G,
                 a0=CONSTANTS.mond_a0):
        strength = (4.0 / 3.0 * (np.sqrt(2.0) - 1.0) * mass *
                    np.sqrt(newton_G * mass * a0))
        super(Mond, self).__init__(strength, separation, 1, mass, separation)


@dataclasses.dataclass(frozen=True)
class HarmonicTrap(CentralPotentialSpec):
    '''Both particles held in identical traps of frequency omega0; in the
    relative coordinate this adds (1/4) m omega0**2 r**2.

    '''
    omega0: float
    mass: float
    separation: float

    def coefficient(self, n):
        return 0.25 * self.mass * self.omega0 ** 2 if n == 2 else 0.0

    def potential(self, r):
        return 0.25 * self.mass * self.omega0 ** 2 * np.asarray(r) ** 2


@dataclasses.dataclass(frozen=True)
class Composite(CentralPotentialSpec):
    members: Tuple[CentralPotentialSpec, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError('a composite interaction needs members')
        object.__setattr__(self, 'members', tuple(self.members))
        masses = {m.mass for m in self.members}
        separations = {m.separation for m in self.members}
        if len(masses) != 1 or len(separations) != 1:
            raise ValueError('composite members must share mass and separation')

    @property
    def mass(self):
        return self.members[0].mass

    @property
    def separation(self):
        return self.members[0].separation

    def coefficient(self, n):
        return sum(m.coefficient(n) for m in self.members)

    def potential(self, r):
        return sum(m.potential(r) for m in self.members)


def omega_squared(spec):
    '''Gaussian-regime frequency squared, omega**2 = |4 c_2 / m|.

    ``attractive`` is False for repulsions and traps, where the closed forms
    use omega -> i omega.

    '''
    c2 = spec.coefficient(2)
    return OmegaSquared(value=abs(4.0 * c2 / spec.mass), attractive=c2 < 0)


def expand(spec, order):
    if order < 0:
        raise ValueError('expansion order must be non-negative')
    coeffs = np.array([spec.coefficient(n) for n in range(order + 1)],
                      dtype=float)
    return ExpansionCoeffs(order, coeffs)


def drift_moment(k, mean, spread):
    '''E[r**k] for a normally distributed r.'''
    total = 0.0
    for m in range(0, k + 1, 2):
        total += (binom(k, m) * mean ** (k - m) *
                  (np.sqrt(2.0) * spread) ** m * gamma((m + 1) / 2.0) /
                  np.sqrt(np.pi))
    return total


def epsilon_n(spec, n, p0, sigma, omega0, mass, t):
    '''Correction factor of the n-th order term to the force gradient.

    The relative coordinate is taken to drift freely, r ~ N(-2 p0 t / m,
    2 sigma**2 (1 + omega0**2 t**2)), and the r**n term is averaged over it.

    '''
    if n < 3:
        raise ValueError('corrections start at n = 3')
    mean = -2.0 * p0 * t / mass
    spread = np.sqrt(2.0 * sigma ** 2 * (1.0 + (omega0 * t) ** 2))
    ratio = spec.coefficient(n) / spec.coefficient(2)
    return 0.5 * n * (n - 1) * ratio * drift_moment(n - 2, mean, spread)


def epsilon3(spec, p0, mass, t):
    mean = -2.0 * p0 * np.asarray(t, dtype=float) / mass
    return 3.0 * spec.coefficient(3) / spec.coefficient(2) * mean


def epsilon3_strong_coupling(spec, mean_r):
    '''epsilon_3 from a supplied <r>(t) instead of the free drift.'''
    return 3.0 * spec.coefficient(3) / spec.coefficient(2) * np.asarray(mean_r)


def epsilon4(spec, p0, sigma, omega0, mass, t):
    return epsilon_n(spec, 4, p0, sigma, omega0, mass, t)


@dataclasses.dataclass(frozen=True)
class MondRegime(object):
    deep_mond: bool
    ratio: float
    threshold: float
    newtonian_acceleration: float


def mond_regime_check(density, radius, separation,
                      newton_G=CONSTANTS.newton_G, a0=CONSTANTS.mond_a0):
    '''Whether a pair of spheres sits deep enough in the MOND regime for
    MOND entanglement to dominate: L/R0 > sqrt(3)/(sqrt(2) - 1) *
    sqrt(pi G rho R0 / a0), equivalently a_N/a0 < (4/9)(sqrt(2) - 1)**2.

    '''
    mass = sphere_mass(density, radius)
    acceleration = newton_G * mass / separation ** 2
    threshold = (np.sqrt(3.0) / (np.sqrt(2.0) - 1.0) *
                 np.sqrt(np.pi * newton_G * density * radius / a0))
    ratio = separation / radius
    return MondRegime(deep_mond=bool(ratio > threshold), ratio=ratio,
                      threshold=threshold,
                      newtonian_acceleration=acceleration)
