"""Compactly supported polynomial-spline bump functions on the group.

A bump is amplitude * max(0, 1 - q)^order with the scaled quadratic
q = sum_k ((p_k - c_k) / r_k)^2; order 4 makes it C^3, enough smoothness
for every operator used by the semigroup bound checks.  Values and
gradients are vectorized over (n, 3) point arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._regimes import g_pair, r_pair, regime_code
from .representation import AffineRep

__all__ = ["Bump", "horizontal_gradient", "gamma_values"]


@dataclass(frozen=True)
class Bump:
    center: tuple[float, float, float]
    radius: tuple[float, float, float]
    order: int = 4
    amplitude: float = 1.0

    def _q(self, pts: np.ndarray):
        c = np.asarray(self.center)
        r = np.asarray(self.radius)
        z = (pts - c) / r
        return np.sum(z * z, axis=1), z, r

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        q, _, _ = self._q(pts)
        return self.amplitude * np.where(q < 1.0, (1.0 - np.minimum(q, 1.0)) ** self.order, 0.0)

    def grad(self, pts) -> np.ndarray:
        """Coordinate gradient (d/dtheta, d/dx, d/dy), rows per point."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        q, z, r = self._q(pts)
        inside = q < 1.0
        factor = np.where(inside, (1.0 - np.minimum(q, 1.0)) ** (self.order - 1), 0.0)
        return (-2.0 * self.order * self.amplitude) * factor[:, None] * z / r


def horizontal_gradient(rep: AffineRep, f, pts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Xf, Yf, Rf) of a bump-like f (needs .grad) at an (n, 3) point array."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    grad = f.grad(pts)
    code, p1, p2 = regime_code(rep.regime)
    g1, g2 = g_pair(pts[:, 0], code, p1, p2)
    h1, h2 = r_pair(pts[:, 0], code, p1, p2)
    xf = grad[:, 0]
    yf = g1 * grad[:, 1] + g2 * grad[:, 2]
    rf = h1 * grad[:, 1] + h2 * grad[:, 2]
    return xf, yf, rf


def gamma_values(rep: AffineRep, f, pts) -> tuple[np.ndarray, np.ndarray]:
    """(Gamma(f), Gamma^R(f)) pointwise."""
    xf, yf, rf = horizontal_gradient(rep, f, pts)
    return xf * xf + yf * yf, rf * rf
