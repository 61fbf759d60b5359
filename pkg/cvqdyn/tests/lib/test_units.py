import unittest

import numpy as np
import numpy.testing as npt
import scipy.constants as sc

import cvqdyn.lib.units as units
from cvqdyn.lib.units import CONSTANTS


class TestUnitSystem(unittest.TestCase):

    def test_hbar_in_each_system(self):
        assert units.UnitSystem(units.NATURAL).hbar == CONSTANTS.hbar_c
        assert units.UnitSystem(units.SI).hbar == sc.hbar
        assert units.UnitSystem().hbar == 1.0

    def test_natural_hbar_is_the_si_one(self):
        natural = units.UnitSystem(units.NATURAL)
        npt.assert_allclose(natural.to_si(natural.hbar, 'action'), sc.hbar,
                            rtol=1e-8)

    def test_the_alpha_particle_mass(self):
        natural = units.UnitSystem(units.NATURAL)
        npt.assert_allclose(
            natural.to_si(CONSTANTS.alpha_particle_mass, 'mass'),
            sc.physical_constants['alpha particle mass'][0], rtol=1e-7)

    def test_conversions_invert_each_other(self):
        natural = units.UnitSystem(units.NATURAL)
        values = np.array([1.0, 43.5, 1e4])
        npt.assert_allclose(natural.from_si(natural.to_si(values, 'time'),
                                            'time'), values)
        npt.assert_allclose(natural.to_si(1.0, 'length'), 1e-15)

    def test_si_and_dimensionless_do_not_scale(self):
        for mode in (units.SI, units.DIMENSIONLESS):
            assert units.UnitSystem(mode).scale('energy') == 1.0

    def test_it_rejects_unknown_names(self):
        with self.assertRaises(ValueError):
            units.UnitSystem('imperial')
        with self.assertRaises(ValueError):
            units.UnitSystem(units.NATURAL).scale('temperature')


class TestSphereMass(unittest.TestCase):

    def test_osmium_sphere(self):
        npt.assert_allclose(
            units.sphere_mass(CONSTANTS.density_osmium, 250e-9), 1.478e-15,
            rtol=1e-3)
