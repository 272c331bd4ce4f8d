"""Monte Carlo verification of the heat-semigroup gradient bounds.

For alpha != 0 set kappa = beta^2 + alpha^+ (the bound constant, distinct
from the differential invariant -beta^2 - alpha/2).  The gradient bound
states, for T inside the window [0, T_max), T_max = ln(1 + kappa/|alpha|)
/ (2 kappa):

    Gamma(P_T f) + (1/|alpha|) Gamma^R(P_T f)
        <= c(T) P_T(Gamma(f)) + (1/|alpha|) P_T(Gamma^R(f)),

with c(T) = kappa e^{2 kappa T} / (kappa + |alpha| (1 - e^{2 kappa T})).
The reverse Poincare inequality bounds the same gradient combination by
e^{2(kappa+|alpha|)T} times the P_T terms plus
|alpha| e^{2 k' T} (e^{2 k' T} - 1) (P_T f^2 - (P_T f)^2), k' = kappa+|alpha|,
for every T > 0.

All P_T quantities are estimated on one shared endpoint cloud (common
random numbers); gradients of P_T f use central differences of the
translated cloud, which collapses the variance of the difference.  The
kappa -> 0 degeneration (alpha < 0, beta = 0) is handled with expm1/log1p
forms: c(T) -> 1 / (1 - 2 |alpha| T) and T_max -> 1 / (2 |alpha|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bumps import gamma_values
from .errors import WindowExceeded
from .heat_mc import endpoint_cloud
from .representation import AffineRep, GroupPoint, exp2x2, group_mul, rep_from_params

__all__ = [
    "McSpec",
    "BoundReport",
    "kappa_cd",
    "t_window_max",
    "grad_coefficient",
    "gradient_bound_check",
    "reverse_poincare_check",
]


@dataclass(frozen=True)
class McSpec:
    n_paths: int = 100_000
    n_steps: int = 256
    seed: int = 20260810
    workers: int = 1
    n_blocks: int = 50      # jackknife blocks for standard errors
    fd_step: float = 0.02   # group-translation step for Gamma(P_T f)


@dataclass(frozen=True)
class BoundReport:
    kind: str
    lhs: float
    rhs: float
    lhs_se: float
    rhs_se: float
    T: float
    kappa_cd: float
    t_window_max: float
    passed: bool
    a_curve: tuple = field(default_factory=tuple)

    @property
    def slack_sigmas(self) -> float:
        se = math.hypot(self.lhs_se, self.rhs_se)
        return (self.rhs - self.lhs) / se if se > 0 else math.inf


def kappa_cd(alpha: float, beta: float) -> float:
    return beta * beta + max(alpha, 0.0)


def _phi(z: float) -> float:
    """expm1(z)/z, series-safe at 0."""
    return math.expm1(z) / z if abs(z) > 1e-12 else 1.0 + 0.5 * z


def t_window_max(alpha: float, beta: float) -> float:
    if alpha == 0.0:
        raise ValueError("the bound is stated for alpha != 0")
    k = kappa_cd(alpha, beta)
    z = k / abs(alpha)
    psi = math.log1p(z) / z if z > 1e-12 else 1.0 - 0.5 * z
    return psi / (2.0 * abs(alpha))


def grad_coefficient(T: float, alpha: float, beta: float) -> float:
    """c(T) of the gradient bound; >= 1 and increasing on [0, T_max)."""
    k = kappa_cd(alpha, beta)
    denom = 1.0 - 2.0 * abs(alpha) * T * _phi(2.0 * k * T)
    if denom <= 0.0:
        raise WindowExceeded(f"T = {T} is outside the admissible window")
    return math.exp(2.0 * k * T) / denom


def _translate_cloud(rep: AffineRep, g: GroupPoint, cloud: np.ndarray) -> np.ndarray:
    """g . Z_i for every endpoint row; one fixed left translation."""
    e = exp2x2(rep.regime, g.theta)
    out = np.empty_like(cloud)
    out[:, 0] = g.theta + cloud[:, 0]
    out[:, 1:] = (g.x, g.y) + cloud[:, 1:] @ e.T
    return out


_STENCIL = ((-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0))


def _one_param(rep: AffineRep, letter: str, s: float) -> GroupPoint:
    if letter == "X":
        return GroupPoint(s, 0.0, 0.0)
    vec = rep.ybar if letter == "Y" else rep.rbar
    return GroupPoint(0.0, s * vec[0], s * vec[1])


def _semigroup_samples(rep, f, base: GroupPoint, cloud: np.ndarray, h: float) -> dict:
    """Per-path samples of f at the base point and the 12 stencil translates."""
    samples = {"f": f(_translate_cloud(rep, base, cloud))}
    for letter in ("X", "Y", "R"):
        for s, _ in _STENCIL:
            g = group_mul(rep, base, _one_param(rep, letter, s * h))
            samples[(letter, s)] = f(_translate_cloud(rep, g, cloud))
    return samples


def _grad_semigroup(means: dict, h: float) -> dict:
    out = {}
    for letter in ("X", "Y", "R"):
        out[letter] = sum(w * means[(letter, s)] for s, w in _STENCIL) / h
    return out


def _jackknife(per_path: dict, combine, n_blocks: int) -> tuple[float, float]:
    """Value and delete-one-block jackknife SE of combine({name: mean})."""
    names = list(per_path)
    n = per_path[names[0]].size
    edges = np.linspace(0, n, n_blocks + 1, dtype=int)
    totals = {k: float(np.sum(v)) for k, v in per_path.items()}
    block_sums = {
        k: np.array([np.sum(v[a:b]) for a, b in zip(edges[:-1], edges[1:])])
        for k, v in per_path.items()
    }
    sizes = np.diff(edges)
    full = combine({k: totals[k] / n for k in names})
    loo = []
    for b in range(n_blocks):
        m = n - sizes[b]
        loo.append(combine({k: (totals[k] - block_sums[k][b]) / m for k in names}))
    loo = np.asarray(loo)
    se = math.sqrt((n_blocks - 1) / n_blocks * float(np.sum((loo - np.mean(loo)) ** 2)))
    return full, se


def gradient_bound_check(
    f,
    T: float,
    alpha: float,
    beta: float,
    mc: McSpec = McSpec(),
    base: GroupPoint = GroupPoint(0.0, 0.0, 0.0),
) -> BoundReport:
    """Check the gradient bound at one base point for a bump f."""
    if alpha == 0.0:
        raise ValueError("the gradient bound is stated for alpha != 0")
    rep = rep_from_params(alpha, beta)
    k = kappa_cd(alpha, beta)
    tmax = t_window_max(alpha, beta)
    if T >= tmax:
        raise WindowExceeded(f"T = {T} >= window maximum {tmax}")
    inv_a = 1.0 / abs(alpha)
    a_curve = tuple(
        (float(tt), grad_coefficient(float(tt), alpha, beta))
        for tt in np.linspace(0.0, 0.95 * T if T > 0 else 0.0, 8)
    )
    if T == 0.0:
        g, gr = gamma_values(rep, f, np.array([base]))
        lhs = rhs = float(g[0] + inv_a * gr[0])
        return BoundReport(
            kind="gradient", lhs=lhs, rhs=rhs, lhs_se=0.0, rhs_se=0.0,
            T=0.0, kappa_cd=k, t_window_max=tmax, passed=True, a_curve=a_curve,
        )

    cloud = endpoint_cloud(rep, T, mc.n_paths, mc.n_steps, mc.seed, workers=mc.workers)
    samples = _semigroup_samples(rep, f, base, cloud, mc.fd_step)
    gam, gamR = gamma_values(rep, f, _translate_cloud(rep, base, cloud))
    samples["gam"], samples["gamR"] = gam, gamR
    coeff = grad_coefficient(T, alpha, beta)
    h = mc.fd_step

    def lhs_fn(means):
        d = _grad_semigroup(means, h)
        return d["X"] ** 2 + d["Y"] ** 2 + inv_a * d["R"] ** 2

    def rhs_fn(means):
        return coeff * means["gam"] + inv_a * means["gamR"]

    lhs, lhs_se = _jackknife(samples, lhs_fn, mc.n_blocks)
    rhs, rhs_se = _jackknife(samples, rhs_fn, mc.n_blocks)
    passed = lhs <= rhs + 3.0 * math.hypot(lhs_se, rhs_se)
    return BoundReport(
        kind="gradient", lhs=lhs, rhs=rhs, lhs_se=lhs_se, rhs_se=rhs_se,
        T=T, kappa_cd=k, t_window_max=tmax, passed=passed, a_curve=a_curve,
    )


def reverse_poincare_check(
    f,
    T: float,
    alpha: float,
    beta: float,
    mc: McSpec = McSpec(),
    base: GroupPoint = GroupPoint(0.0, 0.0, 0.0),
) -> BoundReport:
    """Check the reverse Poincare inequality at one base point."""
    if alpha == 0.0:
        raise ValueError("the bound is stated for alpha != 0")
    if T <= 0.0:
        raise ValueError("T must be positive")
    rep = rep_from_params(alpha, beta)
    k = kappa_cd(alpha, beta)
    inv_a = 1.0 / abs(alpha)
    kp = k + abs(alpha)
    e2 = math.exp(2.0 * kp * T)

    cloud = endpoint_cloud(rep, T, mc.n_paths, mc.n_steps, mc.seed, workers=mc.workers)
    samples = _semigroup_samples(rep, f, base, cloud, mc.fd_step)
    gam, gamR = gamma_values(rep, f, _translate_cloud(rep, base, cloud))
    samples["gam"], samples["gamR"] = gam, gamR
    samples["f2"] = samples["f"] ** 2
    h = mc.fd_step

    def lhs_fn(means):
        d = _grad_semigroup(means, h)
        grad_part = d["X"] ** 2 + d["Y"] ** 2 + inv_a * d["R"] ** 2
        return grad_part - e2 * means["gam"] - inv_a * means["gamR"]

    def rhs_fn(means):
        return abs(alpha) * e2 * (e2 - 1.0) * (means["f2"] - means["f"] ** 2)

    lhs, lhs_se = _jackknife(samples, lhs_fn, mc.n_blocks)
    rhs, rhs_se = _jackknife(samples, rhs_fn, mc.n_blocks)
    passed = lhs <= rhs + 3.0 * math.hypot(lhs_se, rhs_se)
    return BoundReport(
        kind="reverse-poincare", lhs=lhs, rhs=rhs, lhs_se=lhs_se, rhs_se=rhs_se,
        T=T, kappa_cd=k, t_window_max=t_window_max(alpha, beta), passed=passed,
    )
