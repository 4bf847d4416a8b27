"""Exponentially decaying performance envelopes and normalized errors.

A funnel is a per-dimension half-width that shrinks from an initial value to
a strictly positive ultimate value,

    rho_i(t) = exp(-rate_i * t) * (initial_i - ultimate_i) + ultimate_i,

and a tracking error e is *contained* at time t when |e_i| < rho_i(t) in
every dimension (strict: the boundary counts as a violation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_vector(value, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a scalar or 1-d vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class FunnelSpec:
    """Per-dimension envelope parameters.

    initial : half-widths at t=0 (config key "p")
    ultimate : strictly positive asymptotic half-widths (config key "q")
    rate : exponential decay rates in 1/s (config key "mu")
    """

    initial: np.ndarray
    ultimate: np.ndarray
    rate: np.ndarray
    span: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        initial = _as_vector(self.initial, "initial")
        ultimate = _as_vector(self.ultimate, "ultimate")
        rate = _as_vector(self.rate, "rate")
        if not (initial.shape == ultimate.shape == rate.shape):
            raise ValueError(
                "funnel vectors must share one dimension, got "
                f"{initial.shape}, {ultimate.shape}, {rate.shape}"
            )
        if not np.all(ultimate > 0.0):
            raise ValueError("ultimate half-widths must be strictly positive")
        if not np.all(ultimate < initial):
            raise ValueError("ultimate half-widths must be strictly below initial ones")
        if not np.all(rate > 0.0):
            raise ValueError("decay rates must be strictly positive")
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "ultimate", ultimate)
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "span", initial - ultimate)

    @classmethod
    def of(cls, initial, ultimate, rate, dim: int | None = None) -> "FunnelSpec":
        """Build a spec, broadcasting scalar entries to `dim` dimensions."""
        p = _as_vector(initial, "initial")
        q = _as_vector(ultimate, "ultimate")
        mu = _as_vector(rate, "rate")
        n = dim if dim is not None else max(p.size, q.size, mu.size)

        def expand(v: np.ndarray, name: str) -> np.ndarray:
            if v.size == n:
                return v
            if v.size == 1:
                return np.full(n, v[0])
            raise ValueError(f"{name} has {v.size} entries, expected 1 or {n}")

        return cls(expand(p, "initial"), expand(q, "ultimate"), expand(mu, "rate"))

    @property
    def dim(self) -> int:
        return self.initial.size

    def eval(self, t: float) -> np.ndarray:
        """Half-width vector rho(t); requires t >= 0."""
        if t < 0.0:
            raise ValueError(f"funnel evaluated at negative time t={t}")
        return np.exp(-self.rate * t) * self.span + self.ultimate

    def eval_derivative(self, t: float) -> np.ndarray:
        """Slope vector rho'(t) = -rate * (rho(t) - ultimate); requires t >= 0."""
        if t < 0.0:
            raise ValueError(f"funnel derivative evaluated at negative time t={t}")
        return -self.rate * self.span * np.exp(-self.rate * t)

    def normalize(self, e, t: float) -> np.ndarray:
        """Error divided elementwise by the half-widths at time t."""
        e = np.asarray(e, dtype=float)
        if e.shape != self.initial.shape:
            raise ValueError(f"error has shape {e.shape}, funnel has dimension {self.dim}")
        return e / self.eval(t)

    def contains(self, e, t: float) -> tuple[np.ndarray, bool]:
        """Strict per-dimension containment flags and their conjunction.

        Defined through `normalize` so that containment and the sup-norm
        test ``max |e_i / rho_i| < 1`` agree bit for bit.
        """
        eps = self.normalize(e, t)
        per_dim = np.abs(eps) < 1.0
        return per_dim, bool(per_dim.all())
