"""Affine 3x3 representations, group law and left-invariant fields.

Every regime is realized inside the same partitioned matrix form

    X = [[A, 0], [0, 0]]    Y = [[0, ybar], [0, 0]]    R = [[0, rbar], [0, 0]]

with a regime-specific 2x2 block A and 2-vectors ybar, rbar, so that the
group is {[[exp(theta A), (x, y)^T], [0, 1]]} with coordinates (theta, x, y).
The left-invariant fields at angle theta have d/dx, d/dy coefficient vectors
exp(theta A) ybar and exp(theta A) rbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .algebra import Regime, regime_from_params
from .errors import NonFiniteError, RegimeMismatch

__all__ = [
    "AffineRep",
    "GroupPoint",
    "FieldCoefficients",
    "build_rep",
    "rep_from_params",
    "exp2x2",
    "exp2x2_generic",
    "group_mul",
    "group_inv",
    "field_coeffs",
    "left_haar_weight",
    "apply_operator",
]


class GroupPoint(NamedTuple):
    theta: float
    x: float
    y: float


class FieldCoefficients(NamedTuple):
    yY: np.ndarray  # exp(theta A) ybar
    yR: np.ndarray  # exp(theta A) rbar


def _block(a: np.ndarray | None, v: np.ndarray | None) -> np.ndarray:
    m = np.zeros((3, 3))
    if a is not None:
        m[:2, :2] = a
    if v is not None:
        m[:2, 2] = v
    return m


@dataclass(frozen=True)
class AffineRep:
    """The regime's 2x2 block A, the vectors ybar/rbar, and the 3x3 matrices."""

    regime: Regime
    A: np.ndarray
    ybar: np.ndarray
    rbar: np.ndarray
    matX: np.ndarray
    matY: np.ndarray
    matR: np.ndarray

    def commutation_residual(self) -> float:
        """Max-entry residual of [X,Y]=beta Y + R, [X,R]=alpha Y, [Y,R]=0."""
        a, b = self.regime.alpha, self.regime.beta

        def comm(m, n):
            return m @ n - n @ m

        r1 = comm(self.matX, self.matY) - b * self.matY - self.matR
        r2 = comm(self.matX, self.matR) - a * self.matY
        r3 = comm(self.matY, self.matR)
        return float(max(np.max(np.abs(r)) for r in (r1, r2, r3)))


def build_rep(regime: Regime) -> AffineRep:
    """The printed matrices for each regime (scalings included)."""
    a, b = regime.alpha, regime.beta
    tag = regime.tag
    if tag == "Rank1Heisenberg":
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        ybar = np.array([0.0, 1.0])
        rbar = np.array([1.0, 0.0])
    elif tag == "Rank1BetaPos":
        A = np.array([[b, 0.0], [0.0, 0.0]])
        ybar = np.array([1.0, 1.0])
        rbar = np.array([0.0, -b])
    elif tag == "DeltaPos":
        l1, l2 = regime.lam1, regime.lam2
        A = np.diag([l1, l2])
        ybar = np.array([-l1, l2])
        rbar = np.array([-a, a])
    elif tag == "DeltaNeg":
        r, w = regime.rho, regime.omega
        A = np.array([[r, -w], [w, r]])
        ybar = np.array([-w, r])
        rbar = np.array([0.0, -(r * r + w * w)])
    elif tag == "DeltaZero":
        l = regime.lam
        A = np.array([[l, 1.0], [0.0, l]])
        ybar = np.array([l - 1.0, -l])
        rbar = np.array([-l * l, l * l])
    else:
        raise RegimeMismatch(f"unknown regime tag {tag!r}")
    return AffineRep(
        regime=regime,
        A=A,
        ybar=ybar,
        rbar=rbar,
        matX=_block(A, None),
        matY=_block(None, ybar),
        matR=_block(None, rbar),
    )


def rep_from_params(alpha: float, beta: float) -> AffineRep:
    return build_rep(regime_from_params(alpha, beta))


def exp2x2(regime: Regime, theta: float) -> np.ndarray:
    """Closed-form exp(theta A) for the regime's block A."""
    tag = regime.tag
    if tag == "Rank1Heisenberg":
        return np.array([[1.0, theta], [0.0, 1.0]])
    if tag == "Rank1BetaPos":
        return np.array([[math.exp(regime.beta * theta), 0.0], [0.0, 1.0]])
    if tag == "DeltaPos":
        return np.diag([math.exp(regime.lam1 * theta), math.exp(regime.lam2 * theta)])
    if tag == "DeltaNeg":
        e = math.exp(regime.rho * theta)
        cs, sn = math.cos(regime.omega * theta), math.sin(regime.omega * theta)
        return np.array([[e * cs, -e * sn], [e * sn, e * cs]])
    if tag == "DeltaZero":
        e = math.exp(regime.lam * theta)
        return np.array([[e, theta * e], [0.0, e]])
    raise RegimeMismatch(f"unknown regime tag {tag!r}")


def exp2x2_generic(rep: AffineRep, theta: float) -> np.ndarray:
    """Scaling-and-squaring cross-check path; never the primary route."""
    return scipy.linalg.expm(theta * rep.A)


def embed(rep: AffineRep, p: GroupPoint) -> np.ndarray:
    m = np.eye(3)
    m[:2, :2] = exp2x2(rep.regime, p.theta)
    m[:2, 2] = (p.x, p.y)
    return m


def group_mul(rep: AffineRep, p: GroupPoint, q: GroupPoint) -> GroupPoint:
    """(theta1, v1) . (theta2, v2) = (theta1 + theta2, v1 + exp(theta1 A) v2)."""
    v = np.array([p.x, p.y]) + exp2x2(rep.regime, p.theta) @ np.array([q.x, q.y])
    return GroupPoint(p.theta + q.theta, float(v[0]), float(v[1]))


def group_inv(rep: AffineRep, p: GroupPoint) -> GroupPoint:
    v = -exp2x2(rep.regime, -p.theta) @ np.array([p.x, p.y])
    return GroupPoint(-p.theta, float(v[0]), float(v[1]))


def field_coeffs(rep: AffineRep, theta: float) -> FieldCoefficients:
    e = exp2x2(rep.regime, theta)
    return FieldCoefficients(yY=e @ rep.ybar, yR=e @ rep.rbar)


def left_haar_weight(rep: AffineRep, p: GroupPoint) -> float:
    """Density of the left Haar measure w.r.t. dtheta dx dy at p.

    Left translation by (theta, v) scales the coordinate volume by
    det exp(theta A) = exp(beta * theta), so d(mu) = exp(-beta * theta) d(coords).
    This is the conversion factor between endpoint-density and Haar-density
    kernel conventions; only the coordinate-volume convention is validated here.
    """
    return math.exp(-rep.regime.beta * p.theta)


_EXP_DIRECTIONS = {"X": 0, "Y": 1, "R": 2}


def _one_param_point(rep: AffineRep, letter: str, s: float) -> GroupPoint:
    if letter == "X":
        return GroupPoint(s, 0.0, 0.0)
    vec = rep.ybar if letter == "Y" else rep.rbar
    return GroupPoint(0.0, s * vec[0], s * vec[1])


def apply_operator(
    rep: AffineRep,
    word: Sequence[str],
    f: Callable[[GroupPoint], float],
    p: GroupPoint,
    h: float = 1e-4,
    order: int = 4,
) -> float:
    """Nested directional derivatives of f along left-invariant fields.

    ``word`` is applied left-to-right as operators: ("X", "Y") computes
    X(Y f) at p.  Each level is a central difference of the given order
    evaluated along the one-parameter subgroup of the field.
    """
    if not word:
        v = float(f(p))
        if not math.isfinite(v):
            raise NonFiniteError(f"test function returned {v} at {p}")
        return v
    head, rest = word[0], word[1:]
    if head not in _EXP_DIRECTIONS:
        raise ValueError(f"operator letters must be X, Y or R, got {head!r}")

    def g(s: float) -> float:
        return apply_operator(rep, rest, f, group_mul(rep, p, _one_param_point(rep, head, s)), h, order)

    if order == 2:
        return (g(h) - g(-h)) / (2.0 * h)
    if order == 4:
        return (-g(2 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2 * h)) / (12.0 * h)
    raise ValueError("order must be 2 or 4")
