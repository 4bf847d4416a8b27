import dataclasses
from fractions import Fraction

import numpy as np
import numpy.testing as npt
import pytest

from funnelsim import (
    ConfigError,
    FeasibilityBounds,
    FunnelSpec,
    Transform,
    check_stage1,
    check_stage2,
    default_a_ref_bar,
    max_disturbance,
)


def bounds_41(d_bar=2.0, a_ref_bar=6.0):
    """The manipulator case-study bound set."""
    return FeasibilityBounds(
        m_lower=1.5,
        vm_lower=np.array([-5.0, -5.0]),
        vm_upper=np.array([5.0, 5.0]),
        m_i=1.6,
        v_ref_bar=np.array([0.02, 0.02]),
        a_ref_bar=np.full(2, a_ref_bar),
        d_bar=None if d_bar is None else np.full(2, d_bar),
    )


FUNNEL_X = FunnelSpec.of(0.2, 0.02, 0.1, dim=2)
FUNNEL_V = FunnelSpec.of(2.0, 0.02, 0.1, dim=2)

# exact rational value of the stage-two margin for the case-study numbers:
# 10 - (5 + 1.6*2 + 0.1*1.98 + 6) / 1.5
STAGE2_MARGIN = Fraction(10) - (
    Fraction(5) + Fraction(16, 10) * 2 + Fraction(1, 10) * Fraction(198, 100) + 6
) / Fraction(3, 2)


class TestStage1:
    def test_case_study_margin(self):
        b = FeasibilityBounds(
            m_lower=1.0, vm_lower=np.zeros(2), vm_upper=np.zeros(2), m_i=1.0,
            v_ref_bar=np.ones(2), a_ref_bar=np.zeros(2),
        )
        check = check_stage1(FUNNEL_X, np.array([6.0, 6.0]), b)
        npt.assert_allclose(check.margins, 6.0 - 0.018 - 1.0, rtol=1e-12)
        assert check.ok

    def test_zero_margin_passes(self):
        b = FeasibilityBounds(
            m_lower=1.0, vm_lower=np.zeros(1), vm_upper=np.zeros(1), m_i=1.0,
            v_ref_bar=np.array([1.0]), a_ref_bar=np.zeros(1),
        )
        f = FunnelSpec.of(0.2, 0.02, 0.1, dim=1)
        rhs = f.rate * f.span + b.v_ref_bar
        check = check_stage1(f, rhs, b)  # budget exactly at the requirement
        npt.assert_array_equal(check.margins, [0.0])
        assert check.ok

    def test_insufficient_budget_fails(self):
        b = FeasibilityBounds(
            m_lower=1.0, vm_lower=np.zeros(1), vm_upper=np.zeros(1), m_i=1.0,
            v_ref_bar=np.array([1.0]), a_ref_bar=np.zeros(1),
        )
        f = FunnelSpec.of(0.2, 0.02, 0.1, dim=1)
        check = check_stage1(f, np.array([0.0]), b)
        assert not check.ok
        npt.assert_allclose(check.margins, [-1.018], rtol=1e-12)

    def test_dimension_mismatch(self):
        b = FeasibilityBounds(
            m_lower=1.0, vm_lower=np.zeros(2), vm_upper=np.zeros(2), m_i=1.0,
            v_ref_bar=np.zeros(2), a_ref_bar=np.zeros(2),
        )
        with pytest.raises(ValueError):
            check_stage1(FUNNEL_X, np.array([6.0]), b)


class TestStage2:
    def test_case_study_margin(self):
        check = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), bounds_41())
        npt.assert_allclose(check.margins, float(STAGE2_MARGIN), atol=1e-12)
        assert check.ok

    def test_zero_bounds_boundary_budget_passes(self):
        # with zero drift/disturbance/slew bounds only the funnel shrink term
        # remains; a budget exactly equal to it sits on the pass boundary
        b = FeasibilityBounds(
            m_lower=1.0, vm_lower=np.zeros(2), vm_upper=np.zeros(2), m_i=1.0,
            v_ref_bar=np.zeros(2), a_ref_bar=np.zeros(2), d_bar=np.zeros(2),
        )
        f = FunnelSpec.of(1.0, 0.5, 0.25, dim=2)
        tau = f.rate * f.span
        check = check_stage2(f, tau, b)
        npt.assert_array_equal(check.margins, [0.0, 0.0])
        assert check.ok

    def test_aggressive_slew_bound_fails(self):
        check = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), bounds_41(a_ref_bar=30.0))
        assert not check.ok
        expected_rhs = Fraction(5) + Fraction(16, 10) * 2 + Fraction(1, 10) * Fraction(198, 100) + 30
        npt.assert_allclose(check.rhs, float(expected_rhs / Fraction(3, 2)), atol=1e-12)

    def test_requires_d_bar(self):
        with pytest.raises(ConfigError):
            check_stage2(FUNNEL_V, np.array([10.0, 10.0]), bounds_41(d_bar=None))


class TestMaxDisturbance:
    def test_case_study_value(self):
        d_max = max_disturbance(FUNNEL_V, np.array([10.0, 10.0]), bounds_41(d_bar=None))
        expected = (Fraction(3, 2) * 10 - 5 - Fraction(1, 10) * Fraction(198, 100) - 6) / Fraction(16, 10)
        npt.assert_allclose(d_max, float(expected), atol=1e-12)
        npt.assert_allclose(d_max, 2.37625, atol=1e-12)

    def test_round_trip_to_zero_margin(self):
        b = bounds_41(d_bar=None)
        d_max = max_disturbance(FUNNEL_V, np.array([10.0, 10.0]), b)
        b2 = dataclasses.replace(b, d_bar=d_max)
        check = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), b2)
        npt.assert_allclose(check.margins, [0.0, 0.0], atol=1e-12)

    def test_zero_budget_clamps(self):
        d_max = max_disturbance(FUNNEL_V, np.zeros(2), bounds_41(d_bar=None))
        npt.assert_array_equal(d_max, [0.0, 0.0])

    def test_exact_boundary_unclamped(self):
        f = FunnelSpec.of(2.0, 0.02, 0.1, dim=1)
        b = FeasibilityBounds(
            m_lower=1.0, vm_lower=np.zeros(1), vm_upper=np.zeros(1), m_i=2.0,
            v_ref_bar=np.zeros(1), a_ref_bar=np.zeros(1),
        )
        tau = f.rate * f.span  # budget exactly consumed by the shrink term
        npt.assert_array_equal(max_disturbance(f, tau, b), [0.0])


class TestDefaultSlewBound:
    def test_published_tanh_rule(self):
        out = default_a_ref_bar(Transform("saturation_tanh", a=5.0), np.array([6.0, 6.0]))
        npt.assert_array_equal(out, [30.0, 30.0])

    def test_zero_budget(self):
        out = default_a_ref_bar(Transform("saturation_tanh", a=5.0), np.zeros(2))
        npt.assert_array_equal(out, [0.0, 0.0])

    def test_scales_with_sharpness(self):
        out = default_a_ref_bar(Transform("saturation_tanh", a=2.0), np.array([1.0, 3.0]))
        npt.assert_array_equal(out, [2.0, 6.0])


class TestMonotonicity:
    def test_margin_monotone_in_bounds(self):
        base = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), bounds_41()).margins
        worse_d = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), bounds_41(d_bar=3.0)).margins
        worse_a = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), bounds_41(a_ref_bar=8.0)).margins
        wider = check_stage2(FunnelSpec.of(3.0, 0.02, 0.1, dim=2), np.array([10.0, 10.0]), bounds_41()).margins
        more_tau = check_stage2(FUNNEL_V, np.array([12.0, 12.0]), bounds_41()).margins
        assert (worse_d <= base).all()
        assert (worse_a <= base).all()
        assert (wider <= base).all()
        assert (more_tau >= base).all()

    def test_dimensions_independent(self):
        b = FeasibilityBounds(
            m_lower=1.5,
            vm_lower=np.array([-5.0, -1.0]),
            vm_upper=np.array([5.0, 1.0]),
            m_i=1.6,
            v_ref_bar=np.array([0.02, 0.5]),
            a_ref_bar=np.array([6.0, 1.0]),
            d_bar=np.array([2.0, 0.5]),
        )
        check = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), b)
        flipped = FeasibilityBounds(
            m_lower=1.5,
            vm_lower=b.vm_lower[::-1].copy(),
            vm_upper=b.vm_upper[::-1].copy(),
            m_i=1.6,
            v_ref_bar=b.v_ref_bar[::-1].copy(),
            a_ref_bar=b.a_ref_bar[::-1].copy(),
            d_bar=b.d_bar[::-1].copy(),
        )
        check2 = check_stage2(FUNNEL_V, np.array([10.0, 10.0]), flipped)
        npt.assert_array_equal(check.margins[::-1], check2.margins)


class TestValidation:
    def test_nonpositive_scalars_rejected(self):
        with pytest.raises(ConfigError):
            FeasibilityBounds(
                m_lower=0.0, vm_lower=np.zeros(1), vm_upper=np.zeros(1), m_i=1.0,
                v_ref_bar=np.zeros(1), a_ref_bar=np.zeros(1),
            )

    def test_negative_reference_bound_rejected(self):
        with pytest.raises(ConfigError):
            FeasibilityBounds(
                m_lower=1.0, vm_lower=np.zeros(1), vm_upper=np.zeros(1), m_i=1.0,
                v_ref_bar=np.array([-1.0]), a_ref_bar=np.zeros(1),
            )
