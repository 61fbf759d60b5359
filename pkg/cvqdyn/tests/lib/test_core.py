import unittest

import numpy as np
import numpy.testing as npt

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core


class TestGrid(unittest.TestCase):

    def test_from_spacing(self):
        grid = core.Grid.from_spacing(-1.0, 0.25, 9)
        assert grid.x_max == 1.0
        assert grid.dx == 0.25
        npt.assert_allclose(grid.points[:3], [-1.0, -0.75, -0.5])

    def test_centered_grid_is_symmetric(self):
        grid = core.Grid.centered(3.0, 2.0, 0.1)
        assert grid.n_points % 2 == 1
        npt.assert_allclose(grid.points[grid.n_points // 2], 3.0)

    def test_it_refuses_tiny_grids(self):
        with self.assertRaises(ValueError):
            core.Grid(0.0, 1.0, 5)

    def test_it_refuses_reversed_bounds(self):
        with self.assertRaises(ValueError):
            core.Grid(1.0, 0.0, 11)


class TestMakeGaussian(unittest.TestCase):

    def test_it_is_normalized_with_zero_walls(self):
        grid = core.Grid.centered(0.0, 15.0, 0.05)
        psi = core.make_gaussian(grid, core.GaussianState(0.0, 1.0, 0.5))
        npt.assert_allclose(psi.norm(), 1.0, rtol=1e-12)
        assert psi.amplitudes[0] == 0 and psi.amplitudes[-1] == 0

    def test_it_raises_if_the_window_leaves_the_grid(self):
        grid = core.Grid.centered(0.0, 5.0, 0.05)
        with self.assertRaises(exceptions.GridTooNarrowException):
            core.make_gaussian(grid, core.GaussianState(0.0, 1.0))

    def test_it_rejects_non_positive_widths(self):
        with self.assertRaises(ValueError):
            core.GaussianState(0.0, 0.0)


class TestMoments(unittest.TestCase):

    def setUp(self):
        self.grid = core.Grid.centered(2.0, 20.0, 0.02)
        self.g = core.GaussianState(2.0, 1.5, 0.7)

    def test_moments_of_a_sampled_gaussian(self):
        m = core.moments(core.make_gaussian(self.grid, self.g))
        npt.assert_allclose(m.mean_x, 2.0, atol=1e-10)
        npt.assert_allclose(m.mean_p, 0.7, rtol=1e-8)
        npt.assert_allclose(m.var_x, 1.5 ** 2, rtol=1e-8)
        npt.assert_allclose(m.var_p, 1.0 / (4.0 * 1.5 ** 2), rtol=1e-6)
        npt.assert_allclose(m.uncertainty_product, 0.5, rtol=1e-6)
        assert abs(m.skewness) < 1e-8
        assert m.satisfies_uncertainty()

    def test_hbar_scales_momenta(self):
        psi = core.make_gaussian(self.grid, self.g, hbar=197.3)
        m = core.moments(psi)
        npt.assert_allclose(m.var_p, 197.3 ** 2 / (4.0 * 1.5 ** 2), rtol=1e-6)

    def test_it_raises_if_not_normalized(self):
        psi = core.make_gaussian(self.grid, self.g)
        psi = psi.copy(psi.amplitudes * 1.01)
        with self.assertRaises(exceptions.NotNormalizedException):
            core.moments(psi)

    def test_energy_shortcut_agrees_for_free_motion(self):
        psi = core.make_gaussian(self.grid, self.g)
        hint = core.EnergyHint(self.g, 1.0, np.zeros(self.grid.n_points), 0.0)
        m = core.moments(psi, energy_hint=hint)
        npt.assert_allclose(m.var_p_shortcut, m.var_p, rtol=1e-4)
        assert not m.shortcut_mismatch


class TestClosedForms(unittest.TestCase):

    def test_free_uncertainty_starts_at_the_minimum(self):
        assert core.analytic_free_uncertainty(0.0, 2.0, 1.0) == 0.5

    def test_free_uncertainty_grows(self):
        omega0 = 1.0 / (2.0 * 4.0)
        npt.assert_allclose(core.analytic_free_uncertainty(20.0, 2.0, 1.0),
                            0.5 * np.sqrt(1.0 + (20.0 * omega0) ** 2))

    def test_trap_ground_state_keeps_minimal_uncertainty(self):
        # sigma = sqrt(hbar / 2 m omega) is the ground state
        sigma = np.sqrt(1.0 / (2.0 * 1.0 * 0.5))
        t = np.linspace(0.0, 10.0, 7)
        npt.assert_allclose(core.analytic_ho_uncertainty(t, sigma, 1.0, 0.5),
                            0.5, rtol=1e-12)

    def test_free_gaussian_matches_make_gaussian_at_zero(self):
        grid = core.Grid.centered(0.0, 15.0, 0.05)
        g = core.GaussianState(0.0, 1.0, 0.3)
        npt.assert_allclose(core.free_gaussian(grid, g, 1.0, 0.0).amplitudes,
                            core.make_gaussian(grid, g).amplitudes,
                            atol=1e-10)

    def test_free_gaussian_drifts_and_spreads(self):
        grid = core.Grid.centered(5.0, 40.0, 0.05)
        g = core.GaussianState(0.0, 1.0, 1.0)
        psi = core.free_gaussian(grid, g, 2.0, 10.0)
        norm, mean, spread = core.position_stats(psi)
        npt.assert_allclose(norm, 1.0, rtol=1e-8)
        npt.assert_allclose(mean, 5.0, rtol=1e-8)
        npt.assert_allclose(spread, np.sqrt(1.0 + (10.0 / 4.0) ** 2),
                            rtol=1e-6)


class TestWaveFunction(unittest.TestCase):

    def test_it_raises_on_mismatched_shapes(self):
        grid = core.Grid(0.0, 1.0, 11)
        with self.assertRaises(exceptions.GridMismatchException):
            core.WaveFunction(grid, np.zeros(10))

    def test_evaluate_interpolates_and_is_zero_outside(self):
        grid = core.Grid.centered(0.0, 15.0, 0.05)
        psi = core.make_gaussian(grid, core.GaussianState(0.0, 1.0, 0.4))
        inside = np.array([0.012, -1.337])
        exact = ((2.0 * np.pi) ** -0.25 * np.exp(-inside ** 2 / 4.0) *
                 np.exp(0.4j * inside))
        npt.assert_allclose(psi.evaluate(inside), exact, atol=1e-6)
        assert psi.evaluate([100.0])[0] == 0

    def test_probability_beyond_the_mean_is_a_half(self):
        grid = core.Grid.centered(0.0, 15.0, 0.01)
        psi = core.make_gaussian(grid, core.GaussianState(0.0, 1.0))
        npt.assert_allclose(psi.probability_beyond(0.0, 'right'), 0.5,
                            atol=5e-3)
        npt.assert_allclose(psi.probability_beyond(0.0, 'left'), 0.5,
                            atol=5e-3)
        assert psi.probability_beyond(15.0, 'right') == 0.0


class TestBoxEigenstate(unittest.TestCase):

    def test_it_has_n_minus_one_nodes(self):
        grid = core.Grid.from_spacing(0.0, 0.01, 1001)
        psi = core.box_eigenstate(grid, 3)
        interior = psi.amplitudes.real[1:-1]
        assert np.count_nonzero(np.diff(np.sign(interior[np.abs(interior) >
                                                          1e-12]))) == 2
        npt.assert_allclose(psi.norm(), 1.0, rtol=1e-12)

    def test_it_rejects_n_below_one(self):
        with self.assertRaises(ValueError):
            core.box_eigenstate(core.Grid(0.0, 1.0, 11), 0)
