"""Path-conditional covariance of the planar component.

Conditionally on the theta-path, the (x, y) component of the diffusion is
a mean-zero Gaussian vector with covariance

    Sigma = int_0^t  M(s) ybar ybar^T M(s)^T  ds,     M(s) = exp((B(s) - beta s) A),

computed here by composite quadrature along a :class:`PathGrid`.  Each
regime has closed-form integrand entries (the primary route); the generic
route assembles M(s) ybar from the 2x2 exponential and exists as a
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._regimes import g_pair, regime_code
from .bridge import PathGrid
from .errors import NonFiniteError
from .representation import AffineRep, exp2x2, exp2x2_generic

__all__ = ["CovarianceAccumulator", "covariance_along_path", "integrand_values"]


@dataclass(frozen=True)
class CovarianceAccumulator:
    sigma: np.ndarray  # (2, 2)
    det: float

    def quadratic_form(self, x: float, y: float) -> float:
        """(x, y) Sigma^{-1} (x, y)^T via the adjugate; requires det > 0."""
        s = self.sigma
        return (s[1, 1] * x * x - 2.0 * s[0, 1] * x * y + s[0, 0] * y * y) / self.det


def integrand_values(rep: AffineRep, beta: float, path: PathGrid, method: str = "closed"):
    """(g1, g2) with g = M(s) ybar on the path grid."""
    u = path.values - beta * path.grid
    if method == "closed":
        code, p1, p2 = regime_code(rep.regime)
        return g_pair(u, code, p1, p2)
    if method in ("exp2x2", "expm"):
        make = exp2x2 if method == "exp2x2" else (lambda reg, s: exp2x2_generic(rep, s))
        g = np.array([make(rep.regime, ui) @ rep.ybar for ui in u])
        return g[:, 0], g[:, 1]
    raise ValueError(f"unknown method {method!r}")


def covariance_along_path(
    rep: AffineRep,
    beta: float,
    path: PathGrid,
    quadrature: str = "trapezoid",
    method: str = "closed",
) -> CovarianceAccumulator:
    """Quadrature of M(s) ybar ybar^T M(s)^T along one path."""
    h = path.t / path.n
    if quadrature == "trapezoid":
        g1, g2 = integrand_values(rep, beta, path, method)
        w = np.full(path.n + 1, h)
        w[0] = w[-1] = h / 2.0
    elif quadrature == "midpoint":
        u = path.values - beta * path.grid
        um = 0.5 * (u[:-1] + u[1:])
        if method == "closed":
            code, p1, p2 = regime_code(rep.regime)
            g1, g2 = g_pair(um, code, p1, p2)
        else:
            g = np.array([exp2x2(rep.regime, ui) @ rep.ybar for ui in um])
            g1, g2 = g[:, 0], g[:, 1]
        w = np.full(um.shape, h)
    else:
        raise ValueError(f"unknown quadrature {quadrature!r}")

    s11 = float((g1 * g1) @ w)
    s12 = float((g1 * g2) @ w)
    s22 = float((g2 * g2) @ w)
    if not (math.isfinite(s11) and math.isfinite(s12) and math.isfinite(s22)):
        u = path.values - beta * path.grid
        raise NonFiniteError(
            "covariance quadrature overflowed; max |u| on path "
            f"= {float(np.max(np.abs(u))):.3g} (consider reducing t)"
        )
    sigma = np.array([[s11, s12], [s12, s22]])
    return CovarianceAccumulator(sigma=sigma, det=float(s11 * s22 - s12 * s12))
