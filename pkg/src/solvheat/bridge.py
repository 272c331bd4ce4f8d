"""Brownian bridge path grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PathGrid", "sample_bridge", "deterministic_path"]


@dataclass(frozen=True)
class PathGrid:
    """A path sampled on the uniform grid s_i = i * t / n, with B(0) = 0."""

    t: float
    n: int
    values: np.ndarray  # (n + 1,)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.n < 2 or v.shape != (self.n + 1,):
            raise ValueError("values must have length n + 1 with n >= 2")
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t, self.n + 1)


def sample_bridge(t: float, theta_target: float, n: int, rng: np.random.Generator) -> PathGrid:
    """Brownian bridge from 0 to ``theta_target`` over [0, t] on n uniform steps.

    B(s_i) = W(s_i) - (s_i / t) W(t) + (s_i / t) theta_target for a standard
    discrete Brownian path W; the endpoint is hit exactly.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    h = t / n
    w = np.empty(n + 1)
    w[0] = 0.0
    np.cumsum(rng.standard_normal(n), out=w[1:])
    w[1:] *= np.sqrt(h)
    frac = np.linspace(0.0, 1.0, n + 1)
    return PathGrid(t=t, n=n, values=w + frac * (theta_target - w[-1]))


def deterministic_path(t: float, n: int, fn) -> PathGrid:
    """Path grid from an explicit function s -> B(s); for quadrature tests."""
    s = np.linspace(0.0, t, n + 1)
    return PathGrid(t=t, n=n, values=np.asarray([fn(si) for si in s], dtype=float))
