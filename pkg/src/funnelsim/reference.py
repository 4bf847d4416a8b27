"""Reference trajectories with analytic derivatives and tight speed bounds.

Every kind is continuously differentiable by construction, and
`velocity_bound` returns the exact per-dimension supremum of |xdot_ref|, so
it can feed the stage-one feasibility check directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .funnel import _as_vector


@dataclass(frozen=True)
class ConstantReference:
    setpoint: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "setpoint", _as_vector(self.setpoint, "setpoint"))

    @property
    def dim(self) -> int:
        return self.setpoint.size

    def eval(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        return self.setpoint.copy(), np.zeros(self.dim)

    def velocity_bound(self) -> np.ndarray:
        return np.zeros(self.dim)


@dataclass(frozen=True)
class SinusoidReference:
    """Per-dimension center_i + A_i * sin(w_i t + phi_i)."""

    center: np.ndarray
    amplitude: np.ndarray
    angular_frequency: np.ndarray
    phase: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self) -> None:
        center = _as_vector(self.center, "center")
        n = center.size

        def expand(v, name):
            v = _as_vector(v, name)
            if v.size == n:
                return v
            if v.size == 1:
                return np.full(n, v[0])
            raise ValueError(f"{name} has {v.size} entries, expected 1 or {n}")

        object.__setattr__(self, "center", center)
        object.__setattr__(self, "amplitude", expand(self.amplitude, "amplitude"))
        object.__setattr__(self, "angular_frequency", expand(self.angular_frequency, "angular_frequency"))
        object.__setattr__(self, "phase", expand(self.phase, "phase"))

    @property
    def dim(self) -> int:
        return self.center.size

    def eval(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        arg = self.angular_frequency * t + self.phase
        x_ref = self.center + self.amplitude * np.sin(arg)
        x_ref_dot = self.amplitude * self.angular_frequency * np.cos(arg)
        return x_ref, x_ref_dot

    def velocity_bound(self) -> np.ndarray:
        return np.abs(self.amplitude * self.angular_frequency)


@dataclass(frozen=True)
class CircleJointReference:
    """Two-dimensional circle: center + radius * [cos(w t), sin(w t)]."""

    center: np.ndarray
    radius: float
    angular_frequency: float

    def __post_init__(self) -> None:
        center = _as_vector(self.center, "center")
        if center.size != 2:
            raise ValueError("circle reference is two-dimensional")
        if not self.radius > 0.0:
            raise ValueError("circle radius must be > 0")
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return 2

    def eval(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        arg = self.angular_frequency * t
        c = np.cos(arg)
        s = np.sin(arg)
        x_ref = self.center + self.radius * np.array([c, s])
        x_ref_dot = self.radius * self.angular_frequency * np.array([-s, c])
        return x_ref, x_ref_dot

    def velocity_bound(self) -> np.ndarray:
        speed = abs(self.radius * self.angular_frequency)
        return np.array([speed, speed])
