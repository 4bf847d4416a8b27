import numpy as np
import numpy.testing as npt
import pytest

from funnelsim import (
    ConstantDisturbance,
    JerkPulse,
    OmniPlant,
    ScaraParams,
    ScaraPlant,
    SinusoidDisturbance,
    SumDisturbance,
    ZeroDisturbance,
    omni_rates,
    scara_accel,
    scara_matrices,
)


class TestScaraMatrices:
    def test_reference_pose(self):
        M, V, G = scara_matrices(ScaraParams(1.0, 1.0, 9.81), [0.0, 0.0], [0.0, 0.0])
        npt.assert_allclose(M, [[8 / 3, 5 / 6], [5 / 6, 1 / 3]], rtol=1e-14)
        npt.assert_array_equal(V, [0.0, 0.0])
        npt.assert_allclose(G, [19.62, 4.905], rtol=1e-14)

    def test_right_angle_elbow(self):
        p = ScaraParams(2.0, 0.5, 9.81)
        M, _, _ = scara_matrices(p, [0.3, np.pi / 2], [0.1, -0.2])
        npt.assert_allclose(M[0, 1], p.m * p.l ** 2 / 3, atol=1e-15)
        npt.assert_allclose(M[1, 0], M[0, 1], rtol=0)

    def test_gravity_free(self):
        rng = np.random.default_rng(3)
        p = ScaraParams(1.3, 0.8, 0.0)
        for _ in range(20):
            _, _, G = scara_matrices(p, rng.uniform(-np.pi, np.pi, 2), rng.uniform(-3, 3, 2))
            npt.assert_array_equal(G, [0.0, 0.0])

    def test_symmetric_positive_definite_everywhere(self):
        p = ScaraParams(0.7, 1.4, 9.81)
        for th2 in np.linspace(-np.pi, np.pi, 181):
            M, _, _ = scara_matrices(p, [0.4, th2], [0.0, 0.0])
            npt.assert_array_equal(M, M.T)
            assert (np.linalg.eigvalsh(M) > 0.0).all()

    def test_velocity_terms_vanish_at_rest(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            _, V, _ = scara_matrices(ScaraParams(), rng.uniform(-np.pi, np.pi, 2), [0.0, 0.0])
            npt.assert_array_equal(V, [0.0, 0.0])

    def test_gravity_independent_of_rates(self):
        x = [0.7, -1.1]
        _, _, G1 = scara_matrices(ScaraParams(), x, [0.0, 0.0])
        _, _, G2 = scara_matrices(ScaraParams(), x, [3.0, -4.0])
        npt.assert_array_equal(G1, G2)


class TestScaraAccel:
    def test_equilibrium_forcing(self):
        p = ScaraParams(1.0, 1.0, 9.81)
        x, v = [0.3, -0.8], [0.5, 0.2]
        _, V, G = scara_matrices(p, x, v)
        d = np.array([0.4, -0.1])
        vdot = scara_accel(p, x, v, V + G - d, d)
        npt.assert_array_equal(vdot, [0.0, 0.0])

    def test_matches_linear_solve_oracle(self):
        # independent route: dense LAPACK solve of M vdot = tau + d - V - G
        p = ScaraParams(1.0, 1.0, 0.0)
        vdot = scara_accel(p, [0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0])
        M, V, G = scara_matrices(p, [0.0, 0.0], [0.0, 0.0])
        expected = np.linalg.solve(M, np.array([1.0, 0.0]) - V - G)
        npt.assert_allclose(vdot, expected, rtol=1e-13)
        npt.assert_allclose(vdot, [12 / 7, -30 / 7], rtol=1e-13)

    def test_acceleration_inversely_proportional_to_mass(self):
        x = [0.2, 0.9]
        tau = [3.0, -1.0]
        light = scara_accel(ScaraParams(1.0, 1.0, 0.0), x, [0.0, 0.0], tau, [0.0, 0.0])
        heavy = scara_accel(ScaraParams(2.0, 1.0, 0.0), x, [0.0, 0.0], tau, [0.0, 0.0])
        npt.assert_allclose(heavy, light / 2.0, rtol=1e-13)

    def test_residual_on_randomized_inputs(self):
        rng = np.random.default_rng(11)
        p = ScaraParams(1.0, 1.0, 9.81)
        for _ in range(1000):
            x = rng.uniform(-np.pi, np.pi, 2)
            v = rng.uniform(-5.0, 5.0, 2)
            tau = rng.uniform(-20.0, 20.0, 2)
            d = rng.uniform(-5.0, 5.0, 2)
            vdot = scara_accel(p, x, v, tau, d)
            M, V, G = scara_matrices(p, x, v)
            residual = M @ vdot + V + G - tau - d
            assert np.abs(residual).max() < 1e-10

    def test_plant_derivative_layout(self):
        plant = ScaraPlant(ScaraParams(1.0, 1.0, 0.0))
        y = np.array([0.1, 0.2, 0.3, 0.4])
        ydot = plant.derivative(y, np.zeros(2), np.zeros(2))
        npt.assert_array_equal(ydot[:2], y[2:])


class TestOmniRates:
    def test_heading_zero_reflects_lateral(self):
        npt.assert_allclose(
            omni_rates([0.0, 0.0, 0.0], [0.1, 0.1, 0.0], np.zeros(3)),
            [0.1, -0.1, 0.0], rtol=0,
        )

    def test_zero_input_passes_disturbance(self):
        d = np.array([0.3, -0.2, 0.05])
        npt.assert_array_equal(omni_rates([1.0, 2.0, 0.7], np.zeros(3), d), d)

    def test_quarter_turn(self):
        npt.assert_allclose(
            omni_rates([0.0, 0.0, np.pi / 2], [1.0, 0.0, 0.0], np.zeros(3)),
            [0.0, 1.0, 0.0], atol=1e-15,
        )

    def test_spatial_speed_preserved(self):
        # the published body-to-world block is orthogonal for every heading
        rng = np.random.default_rng(5)
        for _ in range(200):
            pose = rng.uniform(-3.0, 3.0, 3)
            u = rng.uniform(-1.0, 1.0, 3)
            rates = omni_rates(pose, u, np.zeros(3))
            npt.assert_allclose(
                np.hypot(rates[0], rates[1]), np.hypot(u[0], u[1]), rtol=1e-12
            )

    def test_plant_dimension(self):
        assert OmniPlant().n == 3


class TestDisturbances:
    def test_zero(self):
        npt.assert_array_equal(ZeroDisturbance(2).eval(17.3), [0.0, 0.0])

    def test_constant(self):
        npt.assert_array_equal(ConstantDisturbance([1.0, -2.0]).eval(5.0), [1.0, -2.0])

    def test_sinusoid_peak(self):
        d = SinusoidDisturbance([2.0], [1.0], [0.0])
        npt.assert_array_equal(d.eval(np.pi / 2), [2.0])

    def test_sinusoid_respects_amplitude(self):
        d = SinusoidDisturbance([2.0, 0.5], [1.0, 3.0], [0.3, -1.0])
        for t in np.linspace(0.0, 50.0, 5000):
            assert (np.abs(d.eval(t)) <= d.amplitude).all()

    def test_jerk_window_membership(self):
        d = JerkPulse(10.0, 0.5, [50.0])
        npt.assert_array_equal(d.eval(10.25), [50.0])
        npt.assert_array_equal(d.eval(10.0), [50.0])   # closed at the left
        npt.assert_array_equal(d.eval(10.5), [0.0])    # open at the right
        npt.assert_array_equal(d.eval(10.6), [0.0])
        npt.assert_array_equal(d.eval(9.9), [0.0])

    def test_sum(self):
        d = SumDisturbance((ConstantDisturbance([1.0]), JerkPulse(1.0, 1.0, [2.0])))
        npt.assert_array_equal(d.eval(0.5), [1.0])
        npt.assert_array_equal(d.eval(1.5), [3.0])

    def test_sum_dimension_mismatch(self):
        with pytest.raises(ValueError):
            SumDisturbance((ZeroDisturbance(2), ZeroDisturbance(3)))

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            SinusoidDisturbance([-1.0], [1.0], [0.0])

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(ValueError):
            JerkPulse(0.0, 0.0, [1.0])


class TestParamsValidation:
    def test_rejects_nonpositive_geometry(self):
        with pytest.raises(ValueError):
            ScaraParams(0.0, 1.0, 9.81)
        with pytest.raises(ValueError):
            ScaraParams(1.0, -1.0, 9.81)

    def test_rejects_negative_gravity(self):
        with pytest.raises(ValueError):
            ScaraParams(1.0, 1.0, -9.81)
