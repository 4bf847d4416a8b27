"""Bounded shaping functions applied elementwise to normalized errors.

Two families, both odd, zero at zero, and confined to [-1, 1]:

* saturation kinds plateau at +-1 outside the unit interval, so the
  controller keeps pushing at full authority when the error has left its
  envelope;
* zeroing kinds pass through +-1 at s = +-1 and decay back to 0 far
  outside, so the controller backs off instead.

Every kind is defined and finite on all of R, which is what makes the
control law usable after an envelope violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SATURATION_TANH = "saturation_tanh"
SATURATION_LOGISTIC = "saturation_logistic"
SATURATION_SMOOTH = "saturation_smooth"
ZEROING_SINE_GAUSS = "zeroing_sine_gauss"
ZEROING_POLY_SINE_GAUSS = "zeroing_poly_sine_gauss"

SATURATION_KINDS = (SATURATION_TANH, SATURATION_LOGISTIC, SATURATION_SMOOTH)
ZEROING_KINDS = (ZEROING_SINE_GAUSS, ZEROING_POLY_SINE_GAUSS)
ALL_KINDS = SATURATION_KINDS + ZEROING_KINDS

# Shipped amplitude/sharpness pairs for the zeroing kinds.  They are rounded,
# which puts the fixed point at +-1 only to about 1e-3; pass renormalize=True
# to rescale the amplitude so the fixed point is exact.
DEFAULT_ZEROING = {
    ZEROING_SINE_GAUSS: (2.52, 0.656),
    ZEROING_POLY_SINE_GAUSS: (3.1, 1.125),
}


def _sine_gauss_base(u: float) -> float:
    return math.sin(u) * math.exp(-u * u)


def _poly_sine_gauss_base(u: float) -> float:
    return u * u * math.sin(u) * math.exp(-u * u)


@dataclass(frozen=True)
class Transform:
    """One bounded shaping function.

    kind : one of the five names above
    a : sharpness of the argument scaling, > 0
    c : amplitude, zeroing kinds only, > 0
    renormalize : zeroing kinds only; replace c so that apply(1.0) == 1.0
    """

    kind: str
    a: float = 5.0
    c: float | None = None
    renormalize: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if not self.a > 0.0:
            raise ValueError("sharpness a must be > 0")
        if self.kind in SATURATION_KINDS:
            if self.c is not None:
                raise ValueError(f"{self.kind} takes no amplitude c")
            if self.renormalize:
                raise ValueError("renormalize applies to zeroing kinds only")
        else:
            c = self.c if self.c is not None else DEFAULT_ZEROING[self.kind][0]
            if not c > 0.0:
                raise ValueError("amplitude c must be > 0")
            object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "a", float(self.a))

    @classmethod
    def zeroing(cls, kind: str, renormalize: bool = False) -> "Transform":
        """Zeroing transform with the shipped constants for `kind`."""
        c, a = DEFAULT_ZEROING[kind]
        return cls(kind, a=a, c=c, renormalize=renormalize)

    @property
    def amplitude(self) -> float:
        """Effective amplitude after optional renormalization."""
        if self.kind in SATURATION_KINDS:
            return 1.0
        if self.renormalize:
            base = {ZEROING_SINE_GAUSS: _sine_gauss_base,
                    ZEROING_POLY_SINE_GAUSS: _poly_sine_gauss_base}[self.kind]
            return 1.0 / base(self.a)
        return self.c  # type: ignore[return-value]

    def apply(self, s: float) -> float:
        """Evaluate at a single normalized error; result is in [-1, 1]."""
        s = float(s)
        if not math.isfinite(s):
            raise ValueError(f"transform argument must be finite, got {s}")
        u = self.a * s
        if not math.isfinite(u):  # finite s can still overflow the scaling
            return math.copysign(1.0, s) if self.kind in SATURATION_KINDS else 0.0
        if self.kind == SATURATION_TANH:
            return math.tanh(u)
        if self.kind == SATURATION_LOGISTIC:
            # (e^u - 1)/(e^u + 1) == tanh(u/2); the tanh form cannot overflow
            return math.tanh(0.5 * u)
        if self.kind == SATURATION_SMOOTH:
            return math.tanh(u) * (1.0 - math.exp(-u * u))
        if self.kind == ZEROING_SINE_GAUSS:
            value = self.amplitude * _sine_gauss_base(u)
        else:
            value = self.amplitude * _poly_sine_gauss_base(u)
        # renormalized amplitudes can push the interior peak a hair past 1
        return min(1.0, max(-1.0, value))

    def apply_vec(self, s) -> np.ndarray:
        """Elementwise `apply` over a vector."""
        arr = np.asarray(s, dtype=float)
        return np.array([self.apply(si) for si in arr])

    def derivative(self, s: float) -> float:
        """Analytic first derivative at s."""
        u = self.a * s
        if self.kind == SATURATION_TANH:
            return self.a / math.cosh(min(abs(u), 350.0)) ** 2
        if self.kind == SATURATION_LOGISTIC:
            return 0.5 * self.a / math.cosh(min(abs(0.5 * u), 350.0)) ** 2
        if self.kind == SATURATION_SMOOTH:
            sech2 = 1.0 / math.cosh(min(abs(u), 350.0)) ** 2
            gauss = math.exp(-u * u)
            return self.a * (sech2 * (1.0 - gauss) + 2.0 * u * math.tanh(u) * gauss)
        gauss = math.exp(-min(u * u, 746.0))
        if gauss == 0.0:
            return 0.0
        if self.kind == ZEROING_SINE_GAUSS:
            core = math.cos(u) - 2.0 * u * math.sin(u)
        else:
            core = 2.0 * u * math.sin(u) + u * u * math.cos(u) - 2.0 * u ** 3 * math.sin(u)
        return self.amplitude * self.a * core * gauss

    def derivative_at_zero(self) -> float:
        """Slope at the origin; zero for the chattering-free kinds."""
        if self.kind == SATURATION_TANH:
            return self.a
        if self.kind == SATURATION_LOGISTIC:
            return 0.5 * self.a
        if self.kind == ZEROING_SINE_GAUSS:
            return self.amplitude * self.a
        return 0.0  # saturation_smooth and zeroing_poly_sine_gauss are cubic at 0

    def lipschitz(self) -> float:
        """Global Lipschitz constant, i.e. sup |derivative| over R.

        Exact for the kinds whose slope peaks at the origin; for the others
        the supremum is taken over a dense grid (the derivative decays to 0
        far out, so [-20, 20] covers the peak).
        """
        if self.kind == SATURATION_TANH:
            return self.a
        if self.kind == SATURATION_LOGISTIC:
            return 0.5 * self.a
        if self.kind == ZEROING_SINE_GAUSS:
            return self.amplitude * self.a
        grid = np.linspace(-20.0, 20.0, 80001) / self.a
        return float(max(abs(self.derivative(s)) for s in grid))
