"""Shared regime coding for the Monte Carlo backends.

``exp(u A) ybar`` has closed-form entries (g1(u), g2(u)) in every regime;
both backends and the covariance module evaluate the same table.  Codes:

    0  Rank1Heisenberg   g = (u, 1)
    1  Rank1BetaPos      g = (e^{b u}, 1)                        p1 = beta
    2  DeltaPos          g = (-l1 e^{l1 u}, l2 e^{l2 u})         p1, p2 = l1, l2
    3  DeltaNeg          g = -sqrt(r^2+w^2) e^{r u} (cos(w u - t0), sin(w u - t0))
                                                                  p1, p2 = rho, omega
    4  DeltaZero         g = e^{l u} (l - 1 - l u, -l)           p1 = lam
"""

from __future__ import annotations

import math

import numpy as np

_CODES = {
    "Rank1Heisenberg": 0,
    "Rank1BetaPos": 1,
    "DeltaPos": 2,
    "DeltaNeg": 3,
    "DeltaZero": 4,
}


def regime_code(regime) -> tuple[int, float, float]:
    code = _CODES[regime.tag]
    if code == 0:
        return 0, 0.0, 0.0
    if code == 1:
        return 1, regime.beta, 0.0
    if code == 2:
        return 2, regime.lam1, regime.lam2
    if code == 3:
        return 3, regime.rho, regime.omega
    return 4, regime.lam, 0.0


def g_pair(u: np.ndarray, code: int, p1: float, p2: float) -> tuple[np.ndarray, np.ndarray]:
    """Entries of exp(u A) ybar, vectorized over u."""
    u = np.asarray(u, dtype=float)
    if code == 0:
        return u, np.ones_like(u)
    if code == 1:
        return np.exp(p1 * u), np.ones_like(u)
    if code == 2:
        return -p1 * np.exp(p1 * u), p2 * np.exp(p2 * u)
    if code == 3:
        amp = math.sqrt(p1 * p1 + p2 * p2)
        theta0 = math.atan2(p1, p2)
        env = np.exp(p1 * u)
        phase = p2 * u - theta0
        return -amp * env * np.cos(phase), -amp * env * np.sin(phase)
    if code == 4:
        e = np.exp(p1 * u)
        return e * (p1 - 1.0 - p1 * u), -p1 * e
    raise ValueError(f"unknown regime code {code}")


def r_pair(u: np.ndarray, code: int, p1: float, p2: float) -> tuple[np.ndarray, np.ndarray]:
    """Entries of exp(u A) rbar, vectorized over u."""
    u = np.asarray(u, dtype=float)
    if code == 0:
        return np.ones_like(u), np.zeros_like(u)
    if code == 1:
        return np.zeros_like(u), np.full_like(u, -p1)
    if code == 2:
        alpha = -p1 * p2  # lam1 * lam2 = -alpha
        return -alpha * np.exp(p1 * u), alpha * np.exp(p2 * u)
    if code == 3:
        amp2 = p1 * p1 + p2 * p2  # = -alpha
        env = np.exp(p1 * u)
        return amp2 * env * np.sin(p2 * u), -amp2 * env * np.cos(p2 * u)
    if code == 4:
        e = np.exp(p1 * u)
        return p1 * p1 * e * (u - 1.0), p1 * p1 * np.full_like(u, 1.0) * e
    raise ValueError(f"unknown regime code {code}")
