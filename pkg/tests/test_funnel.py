import mpmath
import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from funnelsim import FunnelSpec


@pytest.fixture
def basic():
    return FunnelSpec.of(0.2, 0.02, 0.1, dim=1)


def high_precision_width(p, q, mu, t):
    # independent oracle: 50-digit exponential
    mpmath.mp.dps = 50
    return float(mpmath.exp(-mpmath.mpf(mu) * t) * (mpmath.mpf(p) - mpmath.mpf(q)) + mpmath.mpf(q))


class TestEval:
    def test_initial_width(self, basic):
        npt.assert_array_equal(basic.eval(0.0), [0.2])

    def test_ultimate_width_at_large_time(self, basic):
        # the exponential underflows, leaving exactly the ultimate width
        npt.assert_array_equal(basic.eval(1e5), [0.02])

    def test_closed_form_at_t10(self, basic):
        expected = high_precision_width(0.2, 0.02, 0.1, 10.0)
        npt.assert_allclose(basic.eval(10.0), [expected], rtol=1e-14)

    def test_negative_time_rejected(self, basic):
        with pytest.raises(ValueError):
            basic.eval(-1e-9)


class TestEvalDerivative:
    def test_initial_slope(self, basic):
        npt.assert_allclose(basic.eval_derivative(0.0), [-0.018], rtol=1e-14)

    def test_flat_at_large_time(self, basic):
        npt.assert_array_equal(basic.eval_derivative(1e5), [0.0])

    def test_closed_form_at_t10(self, basic):
        rho = high_precision_width(0.2, 0.02, 0.1, 10.0)
        npt.assert_allclose(basic.eval_derivative(10.0), [-0.1 * (rho - 0.02)], rtol=1e-13)

    def test_matches_finite_differences(self, basic):
        h = 1e-5
        for t in np.arange(0.0, 50.0 + 1e-9, 0.5):
            if t == 0.0:
                # second-order one-sided difference at the domain edge
                fd = (-3 * basic.eval(0.0) + 4 * basic.eval(h) - basic.eval(2 * h)) / (2 * h)
            else:
                fd = (basic.eval(t + h) - basic.eval(t - h)) / (2 * h)
            npt.assert_allclose(basic.eval_derivative(t), fd, rtol=1e-6)

    def test_negative_time_rejected(self, basic):
        with pytest.raises(ValueError):
            basic.eval_derivative(-0.5)


class TestNormalize:
    def test_simple_ratio(self, basic):
        npt.assert_array_equal(basic.normalize([0.1], 0.0), [0.5])

    def test_zero_error(self):
        f = FunnelSpec.of([0.3, 0.5], [0.1, 0.2], [1.0, 2.0])
        npt.assert_array_equal(f.normalize([0.0, 0.0], 3.7), [0.0, 0.0])

    def test_boundary_is_exactly_one(self, basic):
        e = basic.eval(10.0)
        npt.assert_array_equal(basic.normalize(e, 10.0), [1.0])

    def test_dimension_mismatch(self, basic):
        with pytest.raises(ValueError):
            basic.normalize([0.1, 0.2], 0.0)


class TestContains:
    def test_zero_error_inside(self):
        f = FunnelSpec.of(0.2, 0.02, 0.1, dim=3)
        per_dim, ok = f.contains(np.zeros(3), 12.0)
        assert ok and per_dim.all()

    def test_boundary_excluded(self, basic):
        per_dim, ok = basic.contains(basic.eval(4.0), 4.0)
        assert not ok and not per_dim[0]

    def test_outside_after_decay(self, basic):
        # rho(20) = e^-2 * 0.18 + 0.02 = 0.04436... < 0.05
        assert high_precision_width(0.2, 0.02, 0.1, 20.0) < 0.05
        _, ok = basic.contains([0.05], 20.0)
        assert not ok
        _, ok_early = basic.contains([0.05], 0.0)
        assert ok_early


class TestInvariants:
    def test_monotone_decay(self):
        f = FunnelSpec.of([0.4, 1.0], [0.05, 0.2], [0.3, 0.05])
        times = np.linspace(0.0, 80.0, 400)
        widths = np.array([f.eval(t) for t in times])
        assert (np.diff(widths, axis=0) <= 0.0).all()

    def test_bounds(self):
        f = FunnelSpec.of([0.4, 1.0], [0.05, 0.2], [0.3, 0.05])
        # strictly above the ultimate width while the decay term is still
        # representable; at very large times rounding absorbs it into q
        for t in np.linspace(0.0, 80.0, 300):
            rho = f.eval(t)
            assert (rho > f.ultimate).all()
            assert (rho <= f.initial).all()
        assert (f.eval(1e6) >= f.ultimate).all()

    @given(
        q=st.floats(1e-3, 10.0),
        span=st.floats(1e-3, 10.0),
        mu=st.floats(1e-3, 5.0),
        scale=st.floats(-3.0, 3.0),
        t=st.floats(0.0, 100.0),
    )
    @settings(max_examples=300)
    def test_normalization_equivalence(self, q, span, mu, scale, t):
        f = FunnelSpec.of(q + span, q, mu, dim=1)
        e = np.array([scale * q])
        _, ok = f.contains(e, t)
        assert ok == (np.abs(f.normalize(e, t)).max() < 1.0)


class TestValidation:
    def test_requires_ultimate_below_initial(self):
        with pytest.raises(ValueError):
            FunnelSpec.of(0.2, 0.2, 0.1)

    def test_requires_positive_ultimate(self):
        with pytest.raises(ValueError):
            FunnelSpec.of(0.2, 0.0, 0.1)

    def test_requires_positive_rate(self):
        with pytest.raises(ValueError):
            FunnelSpec.of(0.2, 0.02, 0.0)

    def test_requires_matching_dimensions(self):
        with pytest.raises(ValueError):
            FunnelSpec(np.array([0.2, 0.3]), np.array([0.02]), np.array([0.1]))

    def test_broadcast(self):
        f = FunnelSpec.of(0.2, 0.02, [0.1, 0.2, 0.3])
        assert f.dim == 3
        npt.assert_array_equal(f.initial, [0.2, 0.2, 0.2])
