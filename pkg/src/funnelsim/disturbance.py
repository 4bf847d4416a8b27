"""Deterministic disturbance signals injected into the plant dynamics.

All models are pure functions of time so that every run is exactly
reproducible.  A jerk pulse is the standard way to force an envelope
violation: a large constant vector over a short half-open window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .funnel import _as_vector


@dataclass(frozen=True)
class ZeroDisturbance:
    dim: int

    def eval(self, t: float) -> np.ndarray:
        return np.zeros(self.dim)

    def bound(self) -> np.ndarray:
        return np.zeros(self.dim)


@dataclass(frozen=True)
class ConstantDisturbance:
    value: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _as_vector(self.value, "value"))

    @property
    def dim(self) -> int:
        return self.value.size

    def eval(self, t: float) -> np.ndarray:
        return self.value.copy()

    def bound(self) -> np.ndarray:
        return np.abs(self.value)


@dataclass(frozen=True)
class SinusoidDisturbance:
    """Per-dimension a_i * sin(w_i t + phi_i); |value| never exceeds the
    amplitude."""

    amplitude: np.ndarray
    angular_frequency: np.ndarray
    phase: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self) -> None:
        amp = _as_vector(self.amplitude, "amplitude")
        if not np.all(amp >= 0.0):
            raise ValueError("sinusoid amplitude must be elementwise >= 0")
        n = amp.size

        def expand(v, name):
            v = _as_vector(v, name)
            if v.size == n:
                return v
            if v.size == 1:
                return np.full(n, v[0])
            raise ValueError(f"{name} has {v.size} entries, expected 1 or {n}")

        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "angular_frequency", expand(self.angular_frequency, "angular_frequency"))
        object.__setattr__(self, "phase", expand(self.phase, "phase"))

    @property
    def dim(self) -> int:
        return self.amplitude.size

    def eval(self, t: float) -> np.ndarray:
        return self.amplitude * np.sin(self.angular_frequency * t + self.phase)

    def bound(self) -> np.ndarray:
        return self.amplitude.copy()


@dataclass(frozen=True)
class JerkPulse:
    """Constant vector on [t_start, t_start + duration), zero elsewhere."""

    t_start: float
    duration: float
    magnitude: np.ndarray

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise ValueError("pulse duration must be > 0")
        object.__setattr__(self, "magnitude", _as_vector(self.magnitude, "magnitude"))

    @property
    def dim(self) -> int:
        return self.magnitude.size

    def eval(self, t: float) -> np.ndarray:
        if self.t_start <= t < self.t_start + self.duration:
            return self.magnitude.copy()
        return np.zeros(self.dim)

    def bound(self) -> np.ndarray:
        return np.abs(self.magnitude)


@dataclass(frozen=True)
class SumDisturbance:
    terms: tuple

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("sum disturbance needs at least one term")
        dims = {term.dim for term in terms}
        if len(dims) != 1:
            raise ValueError(f"sum terms disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def eval(self, t: float) -> np.ndarray:
        total = self.terms[0].eval(t)
        for term in self.terms[1:]:
            total = total + term.eval(t)
        return total

    def bound(self) -> np.ndarray:
        # conservative: the terms could peak simultaneously
        return np.sum([term.bound() for term in self.terms], axis=0)
