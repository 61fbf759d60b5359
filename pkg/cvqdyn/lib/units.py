'''Physical constants and the unit systems the simulations run in.

Three systems are supported:

``natural``
    Energies in MeV, lengths in fm, times in fm/c, masses in MeV/c**2 and
    momenta in MeV/c.  The reduced Planck constant is then hbar*c in MeV fm.
``si``
    Plain SI.
``dimensionless``
    hbar = m = 1 demonstrations; quantities carry no physical scale and the
    conversions are the identity.

'''
import dataclasses

import numpy as np
import scipy.constants as sc


@dataclasses.dataclass(frozen=True)
class Constants(object):
    hbar_c: float = 197.3269804
    fine_structure_alpha: float = 1.0 / 137.035999084
    alpha_particle_mass: float = 3727.3794066
    newton_G: float = sc.G
    mond_a0: float = 1.2e-10
    boltzmann_kB: float = sc.k
    # kg/m**3
    density_osmium: float = 22587.2
    density_silica: float = 2650.0
    speed_of_light: float = sc.c
    hbar: float = sc.hbar


CONSTANTS = Constants()

_MEV = sc.mega * sc.electron_volt
_FM = sc.femto

NATURAL = 'natural'
SI = 'si'
DIMENSIONLESS = 'dimensionless'
MODES = (NATURAL, SI, DIMENSIONLESS)

# Scale of one natural unit of each kind, expressed in SI.
_NATURAL_SCALES = {
    'length': _FM,
    'time': _FM / sc.c,
    'energy': _MEV,
    'mass': _MEV / sc.c ** 2,
    'momentum': _MEV / sc.c,
    'frequency': sc.c / _FM,
    'action': _MEV * _FM / sc.c,
}


class UnitSystem(object):
    '''Conversion between one of the supported unit systems and SI.

    :param mode: one of ``'natural'``, ``'si'`` or ``'dimensionless'``
    :type mode: string

    '''
    def __init__(self, mode=DIMENSIONLESS, constants=CONSTANTS):
        if mode not in MODES:
            raise ValueError('unknown unit system {0!r}'.format(mode))
        self.mode = mode
        self.constants = constants

    def __repr__(self):
        return 'UnitSystem({0!r})'.format(self.mode)

    @property
    def hbar(self):
        if self.mode == NATURAL:
            return self.constants.hbar_c
        if self.mode == SI:
            return self.constants.hbar
        return 1.0

    def scale(self, kind):
        if self.mode != NATURAL:
            return 1.0
        try:
            return _NATURAL_SCALES[kind]
        except KeyError:
            raise ValueError('unknown quantity kind {0!r}'.format(kind))

    def to_si(self, value, kind):
        return np.asarray(value, dtype=float) * self.scale(kind)

    def from_si(self, value, kind):
        return np.asarray(value, dtype=float) / self.scale(kind)


def sphere_mass(density, radius):
    '''Mass of a homogeneous sphere.'''
    return density * 4.0 / 3.0 * np.pi * radius ** 3
