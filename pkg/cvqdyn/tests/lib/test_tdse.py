import unittest

import numpy as np
import numpy.testing as npt
import pytest

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core
import cvqdyn.lib.tdse as tdse


def _free_run(dx, dt, stencil, t_end=5.0, sigma=1.0, momentum=1.0):
    g = core.GaussianState(0.0, sigma, momentum)
    grid = core.Grid.centered(2.5, 30.0, dx)
    system = tdse.build_system(grid, None, 1.0, dt, stencil)
    psi = core.make_gaussian(grid, g)
    for _ in range(int(round(t_end / dt))):
        psi = tdse.step(system, psi)
    return g, grid, psi


class TestStepperConfig(unittest.TestCase):

    def test_it_rejects_a_zero_step(self):
        with self.assertRaises(ValueError):
            tdse.StepperConfig(0.0)

    def test_negative_steps_are_allowed(self):
        assert tdse.StepperConfig(-0.01).dt == -0.01

    def test_it_rejects_unknown_stencils(self):
        with self.assertRaises(ValueError):
            tdse.StepperConfig(0.01, 'hepta')

    def test_derivative_order_follows_the_stencil(self):
        assert tdse.StepperConfig(0.01, tdse.TRI).derivative_order == 3
        assert tdse.StepperConfig(0.01, tdse.PENTA).derivative_order == 5


class TestBuildSystem(unittest.TestCase):

    def test_it_raises_on_a_mismatched_potential(self):
        grid = core.Grid(0.0, 1.0, 11)
        with self.assertRaises(exceptions.GridMismatchException):
            tdse.build_system(grid, tdse.PotentialGrid(np.zeros(10)), 1.0,
                              0.01)

    def test_step_refuses_a_foreign_grid(self):
        system = tdse.build_system(core.Grid(0.0, 1.0, 11), None, 1.0, 0.01)
        psi = core.box_eigenstate(core.Grid(0.0, 2.0, 11), 1)
        with self.assertRaises(exceptions.GridMismatchException):
            tdse.step(system, psi)


class TestUnitarity(unittest.TestCase):

    def test_norm_and_energy_are_conserved(self):
        for stencil in tdse.STENCILS:
            g, grid, psi = _free_run(0.05, 0.01, stencil, t_end=1.0)
            system = tdse.build_system(grid, None, 1.0, 0.01, stencil)
            initial = core.make_gaussian(grid, g)
            npt.assert_allclose(psi.norm(), 1.0, atol=1e-8)
            npt.assert_allclose(system.energy(psi), system.energy(initial),
                                rtol=1e-10)

    def test_running_backwards_restores_the_state(self):
        g, grid, psi = _free_run(0.05, 0.01, tdse.PENTA, t_end=1.0)
        back = tdse.build_system(grid, None, 1.0, -0.01)
        for _ in range(100):
            psi = tdse.step(back, psi)
        npt.assert_allclose(psi.amplitudes, core.make_gaussian(grid, g).amplitudes,
                            atol=1e-10)
        npt.assert_allclose(psi.time, 0.0, atol=1e-12)

    @pytest.mark.slow
    def test_norm_drift_over_many_steps(self):
        grid = core.Grid.centered(0.0, 30.0, 0.1)
        potential = tdse.PotentialGrid.from_callable(
            grid, lambda x: 0.5 * 0.04 * x ** 2)
        system = tdse.build_system(grid, potential, 1.0, 0.01)
        psi = core.make_gaussian(grid, core.GaussianState(0.0, 2.0, 0.5))
        for _ in range(100000):
            psi = tdse.step(system, psi)
        npt.assert_allclose(psi.norm(), 1.0, atol=1e-8)


class TestBoxStationarity(unittest.TestCase):

    def test_box_eigenstates_are_stationary(self):
        grid = core.Grid.from_spacing(0.0, 0.05, 201)
        for stencil in tdse.STENCILS:
            for n in (1, 4):
                psi = core.box_eigenstate(grid, n)
                rho = psi.density()
                system = tdse.build_system(grid, None, 1.0, 0.01, stencil)
                for _ in range(500):
                    psi = tdse.step(system, psi)
                assert np.max(np.abs(psi.density() - rho)) <= \
                    1e-8 * np.max(rho)

    def test_box_energy_approaches_the_continuum(self):
        grid = core.Grid.from_spacing(0.0, 0.01, 1001)
        psi = core.box_eigenstate(grid, 1)
        exact = np.pi ** 2 / (2.0 * grid.length ** 2)
        tri = tdse.build_system(grid, None, 1.0, 0.01, tdse.TRI).energy(psi)
        penta = tdse.build_system(grid, None, 1.0, 0.01, tdse.PENTA).energy(psi)
        npt.assert_allclose(tri, exact, rtol=1e-5)
        assert abs(penta - exact) < abs(tri - exact)


class TestAccuracy(unittest.TestCase):

    def test_free_packet_matches_the_closed_form(self):
        g, grid, psi = _free_run(0.05, 0.005, tdse.PENTA)
        exact = core.free_gaussian(grid, g, 1.0, psi.time)
        m = core.moments(psi)
        npt.assert_allclose(m.mean_x, 5.0, rtol=1e-4)
        npt.assert_allclose(m.uncertainty_product,
                            core.analytic_free_uncertainty(psi.time, 1.0, 1.0),
                            rtol=1e-4)
        overlap = abs(np.sum(np.conj(exact.amplitudes) * psi.amplitudes) *
                      grid.dx)
        npt.assert_allclose(overlap, 1.0, atol=1e-5)

    def test_penta_beats_tri(self):
        errors = {}
        for stencil in tdse.STENCILS:
            g, grid, psi = _free_run(0.2, 0.002, stencil)
            errors[stencil] = abs(
                core.moments(psi, order=5).uncertainty_product -
                core.analytic_free_uncertainty(psi.time, 1.0, 1.0))
        assert errors[tdse.PENTA] < errors[tdse.TRI]

    def test_convergence_order_of_a_power_law(self):
        spacings = np.array([0.4, 0.2, 0.1])
        npt.assert_allclose(tdse.convergence_order(spacings, 3.0 * spacings ** 4),
                            4.0)


class TestRegrid(unittest.TestCase):

    def setUp(self):
        self.grid = core.Grid.centered(0.0, 10.0, 0.05)

    def test_a_centred_packet_needs_no_regrid(self):
        psi = core.make_gaussian(self.grid, core.GaussianState(0.0, 1.0))
        assert not tdse.needs_regrid(psi, tdse.RegridPolicy())

    def test_an_off_centre_packet_needs_a_regrid(self):
        psi = core.free_gaussian(self.grid, core.GaussianState(4.0, 1.0), 1.0,
                                 0.0)
        assert tdse.needs_regrid(psi, tdse.RegridPolicy())

    def test_regrid_recentres_without_losing_probability(self):
        psi = core.free_gaussian(self.grid, core.GaussianState(4.0, 1.0, 1.0),
                                 1.0, 0.0)
        moved = tdse.regrid(psi)
        _, mean, _ = core.position_stats(moved)
        npt.assert_allclose(moved.norm(), 1.0, rtol=1e-12)
        npt.assert_allclose(mean, 4.0, atol=1e-6)
        npt.assert_allclose(moved.grid.dx, self.grid.dx)
        npt.assert_allclose(moved.grid.points[moved.grid.n_points // 2], 4.0,
                            atol=0.5 * self.grid.dx)
        assert not tdse.needs_regrid(moved, tdse.RegridPolicy())

    def test_propagator_follows_a_moving_packet(self):
        grid = core.Grid.centered(0.0, 11.0, 0.05)
        propagator = tdse.Propagator(None, 1.0, tdse.StepperConfig(0.01),
                                     policy=tdse.RegridPolicy())
        psi = core.make_gaussian(grid, core.GaussianState(0.0, 1.0, 2.0))
        psi = propagator.run(psi, 1000)
        assert propagator.regrids > 0
        m = propagator.moments(psi)
        npt.assert_allclose(m.mean_x, 20.0, rtol=1e-3)
        npt.assert_allclose(psi.norm(), 1.0, atol=1e-6)

    def test_observer_sees_the_cadence(self):
        propagator = tdse.Propagator(None, 1.0, tdse.StepperConfig(0.01))
        psi = core.make_gaussian(self.grid, core.GaussianState(0.0, 1.0))
        seen = []
        propagator.run(psi, 20, lambda n, state: seen.append(n), cadence=5)
        assert seen == [0, 5, 10, 15, 20]

    def test_observer_can_stop_the_run(self):
        propagator = tdse.Propagator(None, 1.0, tdse.StepperConfig(0.01))
        psi = core.make_gaussian(self.grid, core.GaussianState(0.0, 1.0))
        final = propagator.run(psi, 100, lambda n, state: n < 30)
        npt.assert_allclose(final.time, 0.3)
