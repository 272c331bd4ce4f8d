"""Carre-du-champ operators and the curvature-dimension residual.

The left-invariant frame in the group coordinates (theta, x, y) is

    X = d/dtheta,   Y = g1(theta) d/dx + g2(theta) d/dy,
    R = h1(theta) d/dx + h2(theta) d/dy,

with regime-specific coefficient functions, and L = X^2 + Y^2 - beta X.
First and second order forms:

    Gamma(f, g)  = (Xf)(Xg) + (Yf)(Yg)        Gamma^R(f, g) = (Rf)(Rg)
    Gamma_2(f)   = 1/2 L Gamma(f)  - Gamma(f, Lf)
    Gamma_2^R(f) = 1/2 L Gamma^R(f) - Gamma^R(f, Lf)

and the curvature-dimension residual at nu > 0:

    cd(f) = Gamma_2 + nu Gamma_2^R - 1/2 (Lf)^2 - 1/2 (1 - nu^2 alpha^2) Gamma^R
            - (-alpha^+ - beta^2 - 1/nu) Gamma .

All derivatives are exact (sympy) and evaluated with lambdified numpy
functions; finite differences exist only as a validation path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import ClassOverflow

__all__ = [
    "InvariantFrame",
    "TestFunction",
    "frame_for_params",
    "standard_suite",
    "carre",
    "cd_residual",
    "cd_residual_corrected",
    "cd_square_decomposition",
    "cd_sweep",
    "gamma2_expanded",
]

THETA, XS, YS = sp.symbols("theta x y", real=True)
_LOCALS = {"theta": THETA, "x": XS, "y": YS}

TERM_CAP = 20_000  # symbolic term budget; exceeding it signals a runaway input


def _parse(expr) -> sp.Expr:
    # route string inputs onto the module's (real) symbols; a plain sympify
    # would mint assumption-free twins whose derivatives vanish
    if isinstance(expr, str):
        return sp.sympify(expr, locals=_LOCALS)
    return sp.sympify(expr).subs(
        {s: _LOCALS[s.name] for s in sp.sympify(expr).free_symbols if s.name in _LOCALS}
    )


def _exact(v: float):
    """Integers and simple ratios become exact sympy numbers; floats stay floats."""
    r = sp.nsimplify(v, rational=True, tolerance=1e-12)
    return r if sp.Rational(r).q <= 10_000 else sp.Float(v)


@dataclass(frozen=True)
class InvariantFrame:
    """Symbolic field coefficients for one parameter pair."""

    alpha: float
    beta: float
    g1: sp.Expr
    g2: sp.Expr
    h1: sp.Expr
    h2: sp.Expr

    def X(self, f: sp.Expr) -> sp.Expr:
        return _guard(sp.diff(f, THETA))

    def Y(self, f: sp.Expr) -> sp.Expr:
        return _guard(sp.expand(self.g1 * sp.diff(f, XS) + self.g2 * sp.diff(f, YS)))

    def R(self, f: sp.Expr) -> sp.Expr:
        return _guard(sp.expand(self.h1 * sp.diff(f, XS) + self.h2 * sp.diff(f, YS)))

    def L(self, f: sp.Expr) -> sp.Expr:
        return _guard(
            sp.expand(self.X(self.X(f)) + self.Y(self.Y(f)) - _exact(self.beta) * self.X(f))
        )


def _guard(e: sp.Expr) -> sp.Expr:
    n = len(sp.Add.make_args(e))
    if n > TERM_CAP:
        raise ClassOverflow(f"expression grew to {n} terms")
    return e


def frame_for_params(alpha: float, beta: float) -> InvariantFrame:
    """Exact symbolic coefficients of (Y, R) per regime."""
    a, b = _exact(alpha), _exact(beta)
    if alpha == 0.0 and beta == 0.0:
        g1, g2 = THETA, sp.Integer(1)
        h1, h2 = sp.Integer(1), sp.Integer(0)
    elif alpha == 0.0:
        g1, g2 = sp.exp(b * THETA), sp.Integer(1)
        h1, h2 = sp.Integer(0), -b
    else:
        delta = b * b + 4 * a
        sign = sp.sign(sp.nsimplify(delta)) if delta.is_number else None
        if delta == 0:
            lam = b / 2
            e = sp.exp(lam * THETA)
            g1, g2 = e * (lam - 1 - lam * THETA), -lam * e
            h1, h2 = lam**2 * e * (THETA - 1), lam**2 * e
        elif delta > 0:
            rt = sp.sqrt(delta)
            l1, l2 = (b + rt) / 2, (b - rt) / 2
            g1, g2 = -l1 * sp.exp(l1 * THETA), l2 * sp.exp(l2 * THETA)
            h1, h2 = -a * sp.exp(l1 * THETA), a * sp.exp(l2 * THETA)
        else:
            rho, om = b / 2, sp.sqrt(-delta) / 2
            e = sp.exp(rho * THETA)
            cs, sn = sp.cos(om * THETA), sp.sin(om * THETA)
            g1 = e * (-om * cs - rho * sn)
            g2 = e * (-om * sn + rho * cs)
            h1 = (rho**2 + om**2) * e * sn
            h2 = -(rho**2 + om**2) * e * cs
    return InvariantFrame(alpha=float(alpha), beta=float(beta), g1=g1, g2=g2, h1=h1, h2=h2)


class TestFunction:
    """A symbolic function of (theta, x, y) with cached numeric evaluation."""

    def __init__(self, expr, name: str | None = None):
        self.expr = _parse(expr)
        self.name = name or str(self.expr)
        self._fn = None

    def __repr__(self):
        return f"TestFunction({self.name})"

    def lambdified(self):
        if self._fn is None:
            self._fn = sp.lambdify((THETA, XS, YS), self.expr, modules="numpy")
        return self._fn

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = self.lambdified()(pts[:, 0], pts[:, 1], pts[:, 2])
        return np.broadcast_to(np.asarray(out, dtype=float), (pts.shape[0],)).copy()


def apply_field(frame: InvariantFrame, letter: str, f: TestFunction) -> TestFunction:
    """X, Y or R applied to a test function; stays in the symbolic class."""
    op = {"X": frame.X, "Y": frame.Y, "R": frame.R}[letter]
    return TestFunction(sp.expand(op(f.expr)), name=f"{letter}({f.name})")


def apply_L(frame: InvariantFrame, f: TestFunction) -> TestFunction:
    return TestFunction(sp.expand(frame.L(f.expr)), name=f"L({f.name})")


def standard_suite() -> list[TestFunction]:
    """Twelve fixed test functions inside the closed symbolic class."""
    th, x, y = THETA, XS, YS
    exprs = [
        th, x, y, x * y, x**2, y**2,
        th * x, th * y, th**2,
        x * sp.sin(th), y * sp.exp(-th), sp.cos(th),
    ]
    return [TestFunction(e) for e in exprs]


@dataclass(frozen=True)
class CarreExprs:
    gamma: sp.Expr
    gammaR: sp.Expr
    gamma2: sp.Expr
    gamma2R: sp.Expr
    lf: sp.Expr


@lru_cache(maxsize=256)
def _carre_exprs(alpha: float, beta: float, expr_str: str) -> CarreExprs:
    fr = frame_for_params(alpha, beta)
    f = _parse(expr_str)
    xf, yf, rf = fr.X(f), fr.Y(f), fr.R(f)
    lf = fr.L(f)
    gamma = sp.expand(xf * xf + yf * yf)
    gammaR = sp.expand(rf * rf)

    def gamma_bi(u, v):
        return sp.expand(fr.X(u) * fr.X(v) + fr.Y(u) * fr.Y(v))

    gamma2 = sp.expand(fr.L(gamma) / 2 - gamma_bi(f, lf))
    gamma2R = sp.expand(fr.L(gammaR) / 2 - fr.R(f) * fr.R(lf))
    return CarreExprs(gamma=gamma, gammaR=gammaR, gamma2=gamma2, gamma2R=gamma2R, lf=lf)


@dataclass(frozen=True)
class CarreResult:
    gamma: float
    gammaR: float
    gamma2: float
    gamma2R: float
    lf: float


def _eval(expr: sp.Expr, points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    fn = sp.lambdify((THETA, XS, YS), expr, modules="numpy")
    out = np.asarray(fn(pts[:, 0], pts[:, 1], pts[:, 2]), dtype=float)
    return np.broadcast_to(out, (pts.shape[0],)).copy()


def carre(f: TestFunction, point, alpha: float, beta: float) -> CarreResult:
    """All four forms and Lf at one point, via exact symbolics."""
    ex = _carre_exprs(alpha, beta, str(f.expr))
    p = np.asarray(point, dtype=float).reshape(1, 3)
    return CarreResult(
        gamma=float(_eval(ex.gamma, p)[0]),
        gammaR=float(_eval(ex.gammaR, p)[0]),
        gamma2=float(_eval(ex.gamma2, p)[0]),
        gamma2R=float(_eval(ex.gamma2R, p)[0]),
        lf=float(_eval(ex.lf, p)[0]),
    )


def cd_residual(f: TestFunction, points, nu: float, alpha: float, beta: float) -> np.ndarray:
    """Residual of the curvature-dimension inequality at each point (vectorized)."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    ex = _carre_exprs(alpha, beta, str(f.expr))
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    g = _eval(ex.gamma, pts)
    gr = _eval(ex.gammaR, pts)
    g2 = _eval(ex.gamma2, pts)
    g2r = _eval(ex.gamma2R, pts)
    lf = _eval(ex.lf, pts)
    a_plus = max(alpha, 0.0)
    rhs = 0.5 * lf**2 + 0.5 * (1.0 - nu**2 * alpha**2) * gr + (-a_plus - beta**2 - 1.0 / nu) * g
    return g2 + nu * g2r - rhs


def cd_sweep(
    functions,
    param_pairs,
    nus,
    n_points: int = 1000,
    seed: int = 20260810,
    box: float = 1.5,
    corrected: bool = False,
) -> dict:
    """Min residual over functions x points x nu x parameters."""
    rng = np.random.default_rng(seed)
    points = rng.uniform(-box, box, size=(n_points, 3))
    residual = cd_residual_corrected if corrected else cd_residual
    worst = math.inf
    worst_case = None
    for alpha, beta in param_pairs:
        for f in functions:
            for nu in nus:
                res = residual(f, points, nu, alpha, beta)
                i = int(np.argmin(res))
                if res[i] < worst:
                    worst = float(res[i])
                    worst_case = {
                        "function": f.name,
                        "nu": nu,
                        "alpha": alpha,
                        "beta": beta,
                        "point": points[i].tolist(),
                    }
    return {"min_residual": worst, "worst_case": worst_case}


def cd_residual_corrected(
    f: TestFunction, points, nu: float, alpha: float, beta: float
) -> np.ndarray:
    """Residual of the repaired inequality, with the mixed Y/R term restored.

    The strict form drops a cross term: completing the squares in the
    Gamma_2 + nu Gamma_2^R decomposition gives the exact identity

        cd_residual(f) + 2 nu alpha beta (Yf)(Rf)
            = 1/2 (X^2 f - Y^2 f + beta Xf)^2
            + nu (YRf - Xf / nu)^2 + nu (XRf + Yf / nu)^2
            + 1/2 ((XY + YX) f + beta Yf + nu alpha Rf)^2
            + alpha^+ (Xf)^2 + (alpha^+ - alpha) (Yf)^2  >=  0,

    so the left side here is nonnegative for every f, while
    :func:`cd_residual` itself can go negative when alpha * beta != 0
    (see the decomposition test).  The two coincide when alpha*beta = 0.
    """
    fr = frame_for_params(alpha, beta)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    yf = _eval(sp.expand(fr.Y(f.expr)), pts)
    rf = _eval(sp.expand(fr.R(f.expr)), pts)
    return cd_residual(f, pts, nu, alpha, beta) + 2.0 * nu * alpha * beta * yf * rf


def cd_square_decomposition(
    f: TestFunction, points, nu: float, alpha: float, beta: float
) -> np.ndarray:
    """Right-hand side of the identity quoted in :func:`cd_residual_corrected`."""
    fr = frame_for_params(alpha, beta)
    fe = f.expr
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    xf_e, yf_e, rf_e = fr.X(fe), fr.Y(fe), fr.R(fe)
    vals = {
        name: _eval(sp.expand(e), pts)
        for name, e in {
            "xf": xf_e, "yf": yf_e, "rf": rf_e,
            "x2": fr.X(xf_e), "y2": fr.Y(yf_e),
            "s": fr.X(yf_e) + fr.Y(xf_e),
            "xr": fr.X(rf_e), "yr": fr.Y(rf_e),
        }.items()
    }
    a_plus = max(alpha, 0.0)
    return (
        0.5 * (vals["x2"] - vals["y2"] + beta * vals["xf"]) ** 2
        + nu * (vals["yr"] - vals["xf"] / nu) ** 2
        + nu * (vals["xr"] + vals["yf"] / nu) ** 2
        + 0.5 * (vals["s"] + beta * vals["yf"] + nu * alpha * vals["rf"]) ** 2
        + (a_plus - alpha) * vals["yf"] ** 2
    )


def gamma2_expanded(f: TestFunction, point, alpha: float, beta: float) -> tuple[float, float]:
    """The proof-style expansions of Gamma_2 and Gamma_2^R, evaluated at a point.

    Gamma_2   = (X^2 f)^2 + (Y^2 f - beta X f)^2 + (XYf)^2 + (YXf)^2
                - beta^2 (Xf)^2 - 2 (Xf)(YRf) + 2 (Yf)(XRf)
                + beta (Yf)((XY + YX) f) - (alpha + beta^2)(Yf)^2 - beta (Yf)(Rf)
    Gamma_2^R = (XRf)^2 + (YRf)^2 + alpha (Rf)((XY + YX) f - beta (Yf))

    Cross-validates the definitional route in :func:`carre`; the mixed terms
    must read (XY + YX), not (XY + XY).
    """
    fr = frame_for_params(alpha, beta)
    fe = f.expr
    xf, yf, rf = fr.X(fe), fr.Y(fe), fr.R(fe)
    x2, y2 = fr.X(xf), fr.Y(yf)
    xyf, yxf = fr.X(yf), fr.Y(xf)
    xrf, yrf = fr.X(rf), fr.Y(rf)
    a, b = _exact(alpha), _exact(beta)
    s = xyf + yxf
    g2 = (
        x2**2 + (y2 - b * xf) ** 2 + xyf**2 + yxf**2
        - b**2 * xf**2 - 2 * xf * yrf + 2 * yf * xrf
        + b * yf * s - (a + b**2) * yf**2 - b * yf * rf
    )
    g2r = xrf**2 + yrf**2 + a * rf * (s - b * yf)
    p = np.asarray(point, dtype=float).reshape(1, 3)
    return float(_eval(sp.expand(g2), p)[0]), float(_eval(sp.expand(g2r), p)[0])
