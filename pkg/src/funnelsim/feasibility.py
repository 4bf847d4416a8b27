"""Actuation-budget checks for both controller stages.

Containment is only guaranteed when the velocity and torque budgets cover
the worst case the closed loop can demand:

    stage one:  v_max  >=  rate_x * (p_x - q_x) + v_ref_bar
    stage two:  tau_max >= (max(-vm_lower, vm_upper) + m_i * d_bar
                            + rate_v * (p_v - q_v) + a_ref_bar) / m_lower

All comparisons are per dimension.  Failing a check is a warning, not an
error: running deliberately infeasible scenarios is how the two recovery
strategies are exercised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .funnel import FunnelSpec, _as_vector
from .transforms import Transform


@dataclass(frozen=True)
class FeasibilityBounds:
    """Known bounds on the plant, disturbance, and reference.

    d_bar : elementwise disturbance bound, >= 0 (None while solving for it)
    m_lower : scalar lower bound relating tau_max to inverse-inertia-scaled
        torque, > 0
    vm_lower, vm_upper : elementwise bounds on the drift acceleration term
    m_i : scalar gain with which the inverse inertia scales the disturbance, > 0
    v_ref_bar : elementwise bound on the reference velocity, >= 0
    a_ref_bar : elementwise bound on the commanded-velocity slew rate, >= 0
    """

    m_lower: float
    vm_lower: np.ndarray
    vm_upper: np.ndarray
    m_i: float
    v_ref_bar: np.ndarray
    a_ref_bar: np.ndarray
    d_bar: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.m_lower > 0.0:
            raise ConfigError("m_lower must be > 0")
        if not self.m_i > 0.0:
            raise ConfigError("m_i must be > 0")
        for name in ("vm_lower", "vm_upper", "v_ref_bar", "a_ref_bar"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), name))
        for name in ("v_ref_bar", "a_ref_bar"):
            if not np.all(getattr(self, name) >= 0.0):
                raise ConfigError(f"{name} must be elementwise >= 0")
        if self.d_bar is not None:
            d_bar = _as_vector(self.d_bar, "d_bar")
            if not np.all(d_bar >= 0.0):
                raise ConfigError("d_bar must be elementwise >= 0")
            object.__setattr__(self, "d_bar", d_bar)


@dataclass(frozen=True)
class StageCheck:
    """Per-dimension outcome of one feasibility inequality."""

    stage: str
    lhs: np.ndarray
    rhs: np.ndarray
    margins: np.ndarray
    passed: np.ndarray

    @property
    def ok(self) -> bool:
        return bool(self.passed.all())


def check_stage1(funnel_x: FunnelSpec, v_max, bounds: FeasibilityBounds) -> StageCheck:
    """Velocity budget against funnel shrink rate plus reference speed."""
    v_max = _as_vector(v_max, "v_max")
    if v_max.size != funnel_x.dim or bounds.v_ref_bar.size != funnel_x.dim:
        raise ValueError("stage-one bound dimensions do not match the funnel")
    rhs = funnel_x.rate * funnel_x.span + bounds.v_ref_bar
    margins = v_max - rhs
    return StageCheck("stage1", v_max, rhs, margins, margins >= 0.0)


def check_stage2(funnel_v: FunnelSpec, tau_max, bounds: FeasibilityBounds) -> StageCheck:
    """Torque budget against drift, disturbance, funnel shrink, and command slew."""
    tau_max = _as_vector(tau_max, "tau_max")
    if bounds.d_bar is None:
        raise ConfigError("stage-two check needs d_bar; use max_disturbance to solve for it")
    sizes = {tau_max.size, bounds.vm_lower.size, bounds.vm_upper.size,
             bounds.d_bar.size, bounds.a_ref_bar.size, funnel_v.dim}
    if len(sizes) != 1:
        raise ValueError("stage-two bound dimensions do not match the funnel")
    drift = np.maximum(-bounds.vm_lower, bounds.vm_upper)
    rhs = (drift + bounds.m_i * bounds.d_bar + funnel_v.rate * funnel_v.span
           + bounds.a_ref_bar) / bounds.m_lower
    margins = tau_max - rhs
    return StageCheck("stage2", tau_max, rhs, margins, margins >= 0.0)


def max_disturbance(funnel_v: FunnelSpec, tau_max, bounds: FeasibilityBounds) -> np.ndarray:
    """Largest d_bar for which the stage-two margin is still zero, clamped at 0.

    `bounds.d_bar` is ignored; the result round-trips through check_stage2
    to a zero margin whenever the clamp is inactive.
    """
    tau_max = _as_vector(tau_max, "tau_max")
    drift = np.maximum(-bounds.vm_lower, bounds.vm_upper)
    d_max = (bounds.m_lower * tau_max - drift - funnel_v.rate * funnel_v.span
             - bounds.a_ref_bar) / bounds.m_i
    return np.maximum(d_max, 0.0)


def default_a_ref_bar(transform_x: Transform, v_max) -> np.ndarray:
    """Slew-rate bound for the stage-one command: Lipschitz constant of the
    shaping function times the velocity budget."""
    v_max = _as_vector(v_max, "v_max")
    lip = transform_x.lipschitz()
    if not np.isfinite(lip):
        raise ConfigError(
            f"transform {transform_x.kind} has no finite Lipschitz constant; "
            "set a_ref_bar explicitly"
        )
    return lip * v_max
