"""Two-stage tracking law with hard per-dimension input bounds.

Stage one turns a position error into a velocity command,

    v_r_i = -v_max_i * Psi_x(e_x_i / rho_x_i(t)),

stage two turns the velocity error against that command into a torque,

    tau_i = -tau_max_i * Psi_v(e_v_i / rho_v_i(t)).

Both stages read only measured errors, the envelopes, and the shaping
functions; no plant model enters anywhere, and |command| <= bound holds for
every input because |Psi| <= 1.  Velocity-input plants use stage one alone
(single-stage mode) with v_r emitted directly as the command.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .funnel import FunnelSpec, _as_vector
from .transforms import Transform


@dataclass(frozen=True)
class ControllerParams:
    """Funnels, shaping functions, and actuation bounds for both stages.

    Leave `funnel_v`, `transform_v`, and `tau_max` unset for single-stage
    (velocity-input) operation.
    """

    funnel_x: FunnelSpec
    transform_x: Transform
    v_max: np.ndarray
    funnel_v: FunnelSpec | None = None
    transform_v: Transform | None = None
    tau_max: np.ndarray | None = None

    def __post_init__(self) -> None:
        v_max = _as_vector(self.v_max, "v_max")
        if v_max.shape != self.funnel_x.initial.shape:
            raise ConfigError(
                f"v_max has {v_max.size} entries, position funnel has {self.funnel_x.dim}"
            )
        if not np.all(v_max > 0.0):
            raise ConfigError("v_max must be strictly positive")
        object.__setattr__(self, "v_max", v_max)

        stage2 = (self.funnel_v, self.transform_v, self.tau_max)
        if any(part is None for part in stage2) != all(part is None for part in stage2):
            raise ConfigError(
                "funnel_v, transform_v and tau_max must be given together or not at all"
            )
        if self.tau_max is not None:
            tau_max = _as_vector(self.tau_max, "tau_max")
            if tau_max.shape != v_max.shape:
                raise ConfigError(
                    f"tau_max has {tau_max.size} entries, expected {v_max.size}"
                )
            if not np.all(tau_max > 0.0):
                raise ConfigError("tau_max must be strictly positive")
            if self.funnel_v.dim != self.funnel_x.dim:
                raise ConfigError(
                    f"velocity funnel has dimension {self.funnel_v.dim}, "
                    f"position funnel has {self.funnel_x.dim}"
                )
            object.__setattr__(self, "tau_max", tau_max)

    @property
    def two_stage(self) -> bool:
        return self.tau_max is not None

    @property
    def dim(self) -> int:
        return self.funnel_x.dim


@dataclass
class ControlDiagnostics:
    """Intermediate quantities of one control evaluation."""

    e_x: np.ndarray
    eps_x: np.ndarray
    inside_x: np.ndarray
    v_r: np.ndarray
    e_v: np.ndarray | None = None
    eps_v: np.ndarray | None = None
    inside_v: np.ndarray | None = None


def stage1_velocity(
    params: ControllerParams, t: float, x, x_ref
) -> tuple[np.ndarray, ControlDiagnostics]:
    """Velocity command from the position error at time t."""
    x = np.asarray(x, dtype=float)
    x_ref = np.asarray(x_ref, dtype=float)
    if x.shape != x_ref.shape or x.size != params.dim:
        raise ValueError(
            f"state/reference shapes {x.shape}/{x_ref.shape} do not match dimension {params.dim}"
        )
    e_x = x - x_ref
    eps_x = params.funnel_x.normalize(e_x, t)
    v_r = -params.v_max * params.transform_x.apply_vec(eps_x)
    diag = ControlDiagnostics(e_x=e_x, eps_x=eps_x, inside_x=np.abs(eps_x) < 1.0, v_r=v_r)
    return v_r, diag


def stage2_torque(
    params: ControllerParams, t: float, v, v_r
) -> tuple[np.ndarray, ControlDiagnostics]:
    """Torque command from the velocity error against the stage-one output."""
    if not params.two_stage:
        raise ConfigError("stage2_torque requires a two-stage controller")
    v = np.asarray(v, dtype=float)
    v_r = np.asarray(v_r, dtype=float)
    if v.shape != v_r.shape or v.size != params.dim:
        raise ValueError(
            f"velocity shapes {v.shape}/{v_r.shape} do not match dimension {params.dim}"
        )
    e_v = v - v_r
    eps_v = params.funnel_v.normalize(e_v, t)
    tau = -params.tau_max * params.transform_v.apply_vec(eps_v)
    diag = ControlDiagnostics(
        e_x=np.zeros(0), eps_x=np.zeros(0), inside_x=np.zeros(0, dtype=bool),
        v_r=v_r, e_v=e_v, eps_v=eps_v, inside_v=np.abs(eps_v) < 1.0,
    )
    return tau, diag


def step(
    params: ControllerParams, t: float, x, v, x_ref
) -> tuple[np.ndarray, ControlDiagnostics]:
    """One full control evaluation: torque in two-stage mode, velocity
    command in single-stage mode (v is ignored there).

    Pure function of its arguments; finite for any error magnitude.
    """
    v_r, diag = stage1_velocity(params, t, x, x_ref)
    if not params.two_stage:
        return v_r, diag
    tau, diag2 = stage2_torque(params, t, v, v_r)
    diag.e_v = diag2.e_v
    diag.eps_v = diag2.eps_v
    diag.inside_v = diag2.inside_v
    return tau, diag
