import unittest

import numpy as np
import numpy.testing as npt

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.core as core
import cvqdyn.lib.frames as frames
import cvqdyn.lib.gaussian as gaussian
import cvqdyn.lib.nongaussian as nongaussian
import cvqdyn.lib.potentials as potentials


def _coupling():
    # omega = 0.2 for unit masses at L = 20
    return potentials.GenericPotential(80.0, 20.0, 1, 1.0)


class TestSchmidtEntropy(unittest.TestCase):

    def setUp(self):
        self.grid = core.Grid.from_spacing(0.0, 0.05, 201)
        self.dx = self.grid.dx

    def test_a_product_state_has_no_entropy(self):
        f = core.box_eigenstate(self.grid, 1).amplitudes
        g = core.box_eigenstate(self.grid, 3).amplitudes
        entropy, result = nongaussian.schmidt_entropy(np.outer(f, g), self.dx,
                                                      self.dx)
        npt.assert_allclose(entropy, 0.0, atol=1e-12)
        assert result.rank == 1

    def test_an_equal_superposition_holds_one_bit(self):
        f1, f2 = (core.box_eigenstate(self.grid, n).amplitudes for n in (1, 2))
        amplitudes = (np.outer(f1, f2) + np.outer(f2, f1)) / np.sqrt(2.0)
        entropy, result = nongaussian.schmidt_entropy(amplitudes, self.dx,
                                                      self.dx)
        npt.assert_allclose(entropy, 1.0, rtol=1e-8)
        assert result.rank == 2
        npt.assert_allclose(result.captured_norm, 1.0)

    def test_it_raises_on_a_clipped_state(self):
        f = core.box_eigenstate(self.grid, 1).amplitudes
        with self.assertRaises(exceptions.SupportClippedException):
            nongaussian.schmidt_entropy(0.5 * np.outer(f, f), self.dx, self.dx)


class TestPredictAmplified(unittest.TestCase):

    def test_entropy_and_negativity_scale_differently(self):
        npt.assert_allclose(nongaussian.predict_amplified([1.0, 2.0],
                                                          [0.1, 0.2]),
                            [1.1, 2.4])
        npt.assert_allclose(nongaussian.predict_amplified(
            [1.0, 2.0], [0.1, 0.2], measure='negativity'), [1.05, 2.2])

    def test_it_rejects_unknown_measures(self):
        with self.assertRaises(ValueError):
            nongaussian.predict_amplified([1.0], [0.1], measure='purity')


class TestMomentumWitness(unittest.TestCase):

    def test_it_is_flat_for_a_quadratic_interaction(self):
        dt = 0.1
        t = np.arange(0.0, 5.0, dt)
        indices, ratio = nongaussian.momentum_witness(-2.0 * np.cosh(0.3 * t),
                                                      dt)
        npt.assert_array_equal(indices, np.arange(2, t.size - 2))
        npt.assert_allclose(ratio, 0.09, rtol=1e-6)

    def test_it_raises_when_the_momentum_crosses_zero(self):
        t = np.linspace(0.0, np.pi, 31)
        with self.assertRaises(exceptions.ZeroMomentumCrossingException):
            nongaussian.momentum_witness(np.cos(t), t[1])

    def test_it_needs_five_samples(self):
        with self.assertRaises(ValueError):
            nongaussian.momentum_witness([1.0, 1.1, 1.2, 1.3], 0.1)


class TestEntanglementSeries(unittest.TestCase):

    def test_times_must_increase(self):
        with self.assertRaises(ValueError):
            nongaussian.EntanglementSeries([0.0, 1.0, 1.0], [0, 0, 0],
                                           [0, 0, 0], [0, 0, 0], 'numeric_N2')

    def test_the_quadratic_run_follows_the_closed_form(self):
        series = nongaussian.entanglement_series(
            _coupling(), 2, 1.0, 0.0, 2.0, 0.01, cadence=50, dx=0.05,
            schmidt=False)
        npt.assert_allclose(series.times, [0.0, 0.5, 1.0, 1.5, 2.0],
                            atol=1e-9)
        negativity, entropy = gaussian.freefall_entanglement(
            series.times, 0.2, 0.5, 1.0)
        npt.assert_allclose(series.negativity, negativity, rtol=1e-3,
                            atol=1e-6)
        npt.assert_allclose(series.entropy_covariance, entropy, rtol=1e-3,
                            atol=1e-6)
        assert series.provenance == 'numeric_N2'
        assert np.all(np.abs(series.skewness) < 1e-4)

    def test_the_schmidt_entropy_agrees_with_the_covariance(self):
        series = nongaussian.entanglement_series(
            _coupling(), 2, 1.0, 0.0, 2.0, 0.01, cadence=200, dx=0.05)
        npt.assert_allclose(series.entropy[-1], series.entropy_covariance[-1],
                            rtol=1e-2)
        assert series.entropy[-1] > 0.02

    def test_threads_do_not_change_the_result(self):
        kwargs = dict(cadence=50, dx=0.05, schmidt=False)
        serial = nongaussian.entanglement_series(_coupling(), 2, 1.0, 0.0,
                                                 1.0, 0.01, **kwargs)
        pooled = nongaussian.entanglement_series(_coupling(), 2, 1.0, 0.0,
                                                 1.0, 0.01, threads=2,
                                                 **kwargs)
        npt.assert_array_equal(serial.negativity, pooled.negativity)

    def test_the_cubic_term_adds_entanglement_for_approaching_particles(self):
        kwargs = dict(cadence=100, dx=0.05, schmidt=False)
        quadratic = nongaussian.entanglement_series(_coupling(), 2, 1.0, 0.5,
                                                    3.0, 0.01, **kwargs)
        cubic = nongaussian.entanglement_series(_coupling(), 3, 1.0, 0.5,
                                                3.0, 0.01, **kwargs)
        assert cubic.entropy_covariance[-1] > quadratic.entropy_covariance[-1]
        assert abs(cubic.skewness[-1]) > abs(quadratic.skewness[-1])

    def test_the_witness_separates_the_orders(self):
        kwargs = dict(cadence=10, dx=0.05, schmidt=False)
        omega_sq = 0.2 ** 2
        quadratic = nongaussian.entanglement_series(_coupling(), 2, 1.0, 0.5,
                                                    3.0, 0.01, **kwargs)
        cubic = nongaussian.entanglement_series(_coupling(), 3, 1.0, 0.5,
                                                3.0, 0.01, **kwargs)
        _, flat = nongaussian.momentum_witness(quadratic.mean_p, 0.1)
        _, drifting = nongaussian.momentum_witness(cubic.mean_p, 0.1)
        npt.assert_allclose(flat / omega_sq, 1.0, atol=1e-2)
        assert (np.max(drifting) - np.min(drifting)) / omega_sq > 1e-2

    def test_a_common_boost_leaves_the_entanglement_alone(self):
        kwargs = dict(cadence=50, dx=0.05, schmidt=False)
        still = nongaussian.entanglement_series(_coupling(), 3, 1.0, 0.5,
                                                2.0, 0.01, **kwargs)
        boosted = nongaussian.entanglement_series(_coupling(), 3, 1.0, 0.5,
                                                  2.0, 0.01, boost=0.5,
                                                  **kwargs)
        npt.assert_allclose(boosted.negativity, still.negativity, rtol=1e-6)
        npt.assert_allclose(boosted.entropy_covariance,
                            still.entropy_covariance, rtol=1e-6)

    def test_the_quadratic_order_ignores_the_approach_speed(self):
        kwargs = dict(cadence=50, dx=0.05, schmidt=False)
        at_rest = nongaussian.entanglement_series(_coupling(), 2, 1.0, 0.0,
                                                  2.0, 0.01, **kwargs)
        approaching = nongaussian.entanglement_series(_coupling(), 2, 1.0,
                                                      0.5, 2.0, 0.01,
                                                      **kwargs)
        # equal up to the grid error of the moved packet
        npt.assert_allclose(approaching.negativity, at_rest.negativity,
                            atol=1e-3)
        npt.assert_allclose(approaching.entropy_covariance,
                            at_rest.entropy_covariance, atol=1e-3)

    def test_order_below_two_is_refused(self):
        with self.assertRaises(ValueError):
            nongaussian.evolve_reduced(_coupling(), 1,
                                       core.GaussianState(0.0, 1.0), 0.5,
                                       1.0, 0.01)


class TestMomentsFromWavefunctions(unittest.TestCase):

    def setUp(self):
        self.dec = frames.decompose(
            frames.BipartiteSpec.identical(1.0, 1.0, 20.0))
        self.psi = frames.relative_wavefunction(
            self.dec, core.Grid.centered(0.0, 14.0, 0.05))

    def test_relative_moments_of_the_initial_packet(self):
        m = nongaussian.relative_moments_from_wavefunction(self.psi)
        npt.assert_allclose(m.mean_r, self.dec.center_rel, atol=1e-10)
        npt.assert_allclose(m.var_r, 2.0, rtol=1e-6)
        npt.assert_allclose(m.var_p, 0.125, rtol=1e-4)
        npt.assert_allclose(m.cov_rp, 0.0, atol=1e-8)

    def test_the_initial_covariance_is_a_product_state(self):
        cm = nongaussian.covariance_from_wavefunctions(
            frames.com_free_moments(self.dec, 0.0), self.psi)
        expected = gaussian.covariance_freefall(0.0, 0.2, self.dec.omega0, 1.0)
        npt.assert_allclose(cm.matrix, expected.matrix, rtol=1e-4, atol=1e-8)
        npt.assert_allclose(gaussian.log_negativity(cm), 0.0, atol=1e-6)
