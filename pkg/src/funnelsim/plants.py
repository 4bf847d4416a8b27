"""Simulable plant models.

Two concrete plants are shipped:

* a two-joint planar manipulator with torque inputs (second order), using
  the standard closed-form inertia/velocity/gravity terms for identical
  links of mass m and length l;
* an omnidirectional ground robot with body-velocity inputs (first order),
  whose pose rates follow the body-to-world map exactly as published for
  this platform -- note the second row [sin, -cos, 0], a reflection rather
  than a rotation, kept verbatim.

The controller never reads any of these parameters; they exist only so the
closed loop can be simulated and the feasibility bounds sanity-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SimulationAbort

SECOND_ORDER = "second_order_torque_input"
FIRST_ORDER = "first_order_velocity_input"

_MIN_DET = 1e-9


@dataclass(frozen=True)
class ScaraParams:
    """Link mass (kg), link length (m), gravity (m/s^2), shared by both links."""

    m: float = 1.0
    l: float = 1.0
    g: float = 9.81

    def __post_init__(self) -> None:
        if not (self.m > 0.0 and self.l > 0.0):
            raise ValueError("link mass and length must be > 0")
        if self.g < 0.0:
            raise ValueError("gravity must be >= 0")


def _scara_terms(p: ScaraParams, x, v) -> tuple[float, ...]:
    """Scalar inertia entries and velocity/gravity forces at (x, v)."""
    th1, th2 = float(x[0]), float(x[1])
    w1, w2 = float(v[0]), float(v[1])
    c1 = math.cos(th1)
    c2 = math.cos(th2)
    s2 = math.sin(th2)
    c12 = math.cos(th1 + th2)
    ml2 = p.m * p.l * p.l
    m11 = ml2 * (5.0 / 3.0 + c2)
    m12 = ml2 * (1.0 / 3.0 + 0.5 * c2)
    m22 = ml2 / 3.0
    v1 = ml2 * s2 * (-0.5 * w2 * w2 - w1 * w2)
    v2 = ml2 * s2 * (0.5 * w1 * w1)
    mgl = p.m * p.g * p.l
    g1 = mgl * (1.5 * c1 + 0.5 * c12)
    g2 = mgl * (0.5 * c12)
    return m11, m12, m22, v1, v2, g1, g2


def scara_matrices(p: ScaraParams, x, v) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inertia matrix, velocity-product vector, and gravity vector at (x, v)."""
    m11, m12, m22, v1, v2, g1, g2 = _scara_terms(p, x, v)
    M = np.array([[m11, m12], [m12, m22]])
    return M, np.array([v1, v2]), np.array([g1, g2])


def scara_accel(p: ScaraParams, x, v, tau, d) -> np.ndarray:
    """Joint accelerations from M(x) vdot = tau + d - V(x,v) - G(x).

    The 2x2 system is solved in closed form; the determinant is bounded
    away from zero for any physical parameters, which is asserted.
    """
    m11, m12, m22, v1, v2, g1, g2 = _scara_terms(p, x, v)
    r1 = float(tau[0]) + float(d[0]) - v1 - g1
    r2 = float(tau[1]) + float(d[1]) - v2 - g2
    det = m11 * m22 - m12 * m12
    if not det > _MIN_DET:
        raise SimulationAbort(f"inertia matrix near singular (det={det!r})")
    return np.array([(m22 * r1 - m12 * r2) / det, (m11 * r2 - m12 * r1) / det])


@dataclass(frozen=True)
class ScaraPlant:
    """Second-order torque-input manipulator."""

    params: ScaraParams = ScaraParams()

    order = SECOND_ORDER
    n = 2

    def derivative(self, y: np.ndarray, tau: np.ndarray, d: np.ndarray) -> np.ndarray:
        """State derivative for y = [angles, rates] under torque tau and
        disturbance d."""
        x = y[:2]
        v = y[2:]
        vdot = scara_accel(self.params, x, v, tau, d)
        return np.concatenate((v, vdot))


def omni_rates(x, u, d) -> np.ndarray:
    """Pose rates of the omnidirectional robot: body velocities u mapped
    through the published heading-dependent matrix, plus disturbance."""
    th = float(x[2])
    c = math.cos(th)
    s = math.sin(th)
    u1, u2, u3 = float(u[0]), float(u[1]), float(u[2])
    return np.array([
        c * u1 + s * u2 + float(d[0]),
        s * u1 - c * u2 + float(d[1]),
        u3 + float(d[2]),
    ])


@dataclass(frozen=True)
class OmniPlant:
    """First-order velocity-input ground robot with pose state [x, y, heading]."""

    order = FIRST_ORDER
    n = 3

    def derivative(self, y: np.ndarray, u: np.ndarray, d: np.ndarray) -> np.ndarray:
        return omni_rates(y, u, d)
