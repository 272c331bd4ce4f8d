"""Classification of sub-Riemannian structures on 3-d solvable Lie algebras.

A structure is a triple: antisymmetric structure constants ``c[k,i,j]``
(so that [e_i, e_j] = sum_k c[k,i,j] e_k), a 2-plane H given by two
spanning coordinate vectors, and an inner product on H given as a 2x2
SPD matrix in that spanning basis.  ``canonicalize`` produces an
orthonormal pair (X, Y) in H and Z = [X, Y] with

    [X, Y] = Z,   [X, Z] = alpha*Y + beta*Z,   [Y, Z] = 0,   beta >= 0,

together with the regime tag derived from the discriminant
delta = beta^2 + 4*alpha and the closed-form CR-geometric constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceProfile
from .errors import DegenerateInput, InvalidAlgebra, NotHormander, NotSolvable

__all__ = [
    "LieAlgebra3",
    "SubRiemannianTriple",
    "CanonicalForm",
    "Regime",
    "GeometricData",
    "ValidationReport",
    "bracket",
    "validate",
    "canonicalize",
    "regime_from_params",
    "characteristic_poly",
    "almost_isomorphic",
    "transform_triple",
    "triple_from_json",
    "triple_to_json",
]

REGIME_TAGS = ("Rank1Heisenberg", "Rank1BetaPos", "DeltaPos", "DeltaNeg", "DeltaZero")


def bracket(c: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """[u, v] in coordinates, for structure constants c[k,i,j]."""
    return np.einsum("kij,i,j->k", c, u, v)


def _numerical_rank(mat: np.ndarray, rel_tol: float) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def _span_basis(mat: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of ``mat``."""
    u, s, _ = np.linalg.svd(mat)
    if mat.size == 0 or s[0] == 0.0:
        return np.zeros((mat.shape[0], 0))
    r = int(np.sum(s > rel_tol * s[0]))
    return u[:, :r]


@dataclass(frozen=True)
class LieAlgebra3:
    """Structure constants of a 3-d Lie algebra, c[k,i,j] antisymmetric in (i,j)."""

    c: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.c, dtype=float)
        if arr.shape != (3, 3, 3):
            raise InvalidAlgebra(f"structure constants must be 3x3x3, got {arr.shape}")
        object.__setattr__(self, "c", arr)

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.c + self.c.transpose(0, 2, 1))))

    def jacobi_residual(self) -> float:
        # [[ei,ej],ek] + [[ej,ek],ei] + [[ek,ei],ej] = 0 for all i,j,k
        c = self.c
        t = np.einsum("mij,lmk->lijk", c, c)
        res = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(res)))

    def derived_brackets(self) -> np.ndarray:
        """The three bracket vectors [e1,e2], [e1,e3], [e2,e3] as columns."""
        return np.stack([self.c[:, 0, 1], self.c[:, 0, 2], self.c[:, 1, 2]], axis=1)

    def derived_rank(self, rel_tol: float = DEFAULT_TOL.rank_rel) -> int:
        return _numerical_rank(self.derived_brackets(), rel_tol)

    def derived_basis(self, rel_tol: float = DEFAULT_TOL.rank_rel) -> np.ndarray:
        return _span_basis(self.derived_brackets(), rel_tol)

    def second_derived_rank(self, rel_tol: float = DEFAULT_TOL.rank_rel) -> int:
        basis = self.derived_basis(rel_tol)
        r = basis.shape[1]
        if r < 2:
            return 0
        cols = [bracket(self.c, basis[:, i], basis[:, j]) for i in range(r) for j in range(i + 1, r)]
        scale = max(1.0, float(np.max(np.abs(self.c))))
        mat = np.stack(cols, axis=1) / scale
        # absolute threshold here: a second derived algebra is zero or it is not
        return int(np.sum(np.linalg.svd(mat, compute_uv=False) > rel_tol))


@dataclass(frozen=True)
class SubRiemannianTriple:
    """Structure constants + horizontal plane + metric on the plane."""

    algebra: LieAlgebra3
    h_basis: np.ndarray  # (2, 3): two spanning coordinate vectors, as rows
    metric: np.ndarray  # (2, 2) SPD matrix in the h_basis

    def __post_init__(self):
        h = np.asarray(self.h_basis, dtype=float)
        g = np.asarray(self.metric, dtype=float)
        if h.shape != (2, 3):
            raise ValueError(f"h_basis must be (2, 3), got {h.shape}")
        if g.shape != (2, 2):
            raise ValueError(f"metric must be (2, 2), got {g.shape}")
        object.__setattr__(self, "h_basis", h)
        object.__setattr__(self, "metric", g)

    def inner(self, p: np.ndarray, q: np.ndarray) -> float:
        """Inner product of H-vectors given by coefficient pairs w.r.t. h_basis."""
        return float(p @ self.metric @ q)

    def h_vector(self, p: np.ndarray) -> np.ndarray:
        """Coordinate vector of the H-element with coefficients p."""
        return p @ self.h_basis


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    residuals: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class Regime:
    """Regime tag plus the derived constants used by the representation layer."""

    tag: str
    alpha: float
    beta: float
    delta: float
    lam1: float | None = None  # delta > 0
    lam2: float | None = None
    rho: float | None = None  # delta < 0
    omega: float | None = None
    theta0: float | None = None
    lam: float | None = None  # delta == 0

    def as_dict(self) -> dict:
        d = {"tag": self.tag, "alpha": self.alpha, "beta": self.beta, "delta": self.delta}
        for k in ("lam1", "lam2", "rho", "omega", "theta0", "lam"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical basis in the original coordinates, plus the parameters."""

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    alpha: float
    beta: float
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GeometricData:
    """Closed-form CR-geometric constants of the canonical structure.

    ``christoffel[a][b]`` holds the coefficients of ``nabla_{E_a} E_b`` in the
    frame (X, Y, R); ``kappa_ab`` is the differential invariant -beta^2 - alpha/2,
    distinct from the bound constant beta^2 + max(alpha, 0) used by the
    semigroup estimates.
    """

    reeb: np.ndarray
    torsion_coeff: float
    ricci_constant: float
    chi: float
    kappa_ab: float
    christoffel: np.ndarray  # (3, 3, 3)


def validate(triple: SubRiemannianTriple, tol: ToleranceProfile = DEFAULT_TOL) -> ValidationReport:
    """Check every standing assumption; report violations instead of raising."""
    violations = []
    residuals: dict = {}
    alg = triple.algebra

    res = alg.antisymmetry_residual()
    residuals["antisymmetry"] = res
    if res > tol.antisymmetry:
        violations.append(f"antisymmetry residual {res:.3e} > {tol.antisymmetry:.1e}")

    res = alg.jacobi_residual()
    residuals["jacobi"] = res
    if res > tol.jacobi:
        violations.append(f"jacobi residual {res:.3e} > {tol.jacobi:.1e}")

    rank = alg.derived_rank(tol.rank_rel)
    residuals["derived_rank"] = rank
    if rank not in (1, 2):
        violations.append(f"derived subalgebra has dimension {rank}, expected 1 or 2")

    rank2 = alg.second_derived_rank(tol.rank_rel)
    residuals["second_derived_rank"] = rank2
    if rank2 != 0:
        violations.append("not solvable: second derived subalgebra is nonzero")

    eigs = np.linalg.eigvalsh(0.5 * (triple.metric + triple.metric.T))
    residuals["metric_min_eig"] = float(eigs[0])
    sym_res = float(np.max(np.abs(triple.metric - triple.metric.T)))
    if sym_res > tol.antisymmetry:
        violations.append(f"metric not symmetric (residual {sym_res:.3e})")
    if eigs[0] <= tol.metric_spd_min:
        violations.append(f"metric not positive definite (min eigenvalue {eigs[0]:.3e})")

    h_rank = _numerical_rank(triple.h_basis.T, tol.rank_rel)
    if h_rank < 2:
        violations.append("h_basis vectors are linearly dependent")
    else:
        h1, h2 = triple.h_basis
        span = np.stack([h1, h2, bracket(alg.c, h1, h2)], axis=1)
        hor_rank = _numerical_rank(span, tol.hormander_rel)
        residuals["hormander_rank"] = hor_rank
        if hor_rank < 3:
            violations.append("Hormander condition fails: H + [H, H] does not span")

    return ValidationReport(tuple(violations), residuals)


def _raise_on_invalid(report: ValidationReport) -> None:
    if report.ok:
        return
    text = "; ".join(report.violations)
    if any("solvable" in v for v in report.violations):
        raise NotSolvable(text)
    if any("Hormander" in v for v in report.violations):
        raise NotHormander(text)
    raise InvalidAlgebra(text)


def _metric_unit(triple: SubRiemannianTriple, p: np.ndarray) -> np.ndarray:
    n = math.sqrt(triple.inner(p, p))
    if n == 0.0:
        raise DegenerateInput("zero vector cannot be normalized")
    return p / n


def _metric_complement(triple: SubRiemannianTriple, y_coeff: np.ndarray) -> np.ndarray:
    """Metric-unit coefficient pair orthogonal to the metric-unit ``y_coeff``."""
    candidates = [w - triple.inner(w, y_coeff) * y_coeff for w in np.eye(2)]
    w = max(candidates, key=lambda v: triple.inner(v, v))
    return _metric_unit(triple, w)


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Deterministic sign: make the largest-magnitude component positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _canonicalize_rank1(triple, tol):
    c = triple.algebra.c
    z0 = _sign_fix(triple.algebra.derived_basis(tol.rank_rel)[:, 0])
    h1, h2 = triple.h_basis
    # iota(Y) lies in ker[.,.] exactly when [Y, Z0] = 0; solve the 3x2
    # null-space problem in the h_basis coefficients
    m = np.stack([bracket(c, h1, z0), bracket(c, h2, z0)], axis=1)
    u, s, vt = np.linalg.svd(m)
    scale = max(s[0], 1.0)
    if s[0] <= tol.rank_rel * max(1.0, float(np.max(np.abs(c)))):
        # whole of H commutes with Z0 (Heisenberg); tie-break towards h1:
        # the metric-unit Y maximizing |<Y, h1>| is h1 itself normalized
        y_coeff = np.array([1.0, 0.0])
    else:
        if s[1] > tol.rank_rel * scale:
            raise DegenerateInput("no direction in H commutes with the derived line")
        y_coeff = vt[1]
    y_coeff = _metric_unit(triple, _sign_fix(y_coeff))
    x_coeff = _metric_unit(triple, _sign_fix(_metric_complement(triple, y_coeff)))

    x_vec = triple.h_vector(x_coeff)
    y_vec = triple.h_vector(y_coeff)
    z_vec = bracket(c, x_vec, y_vec)
    zn = float(z_vec @ z_vec)
    if zn <= (tol.rank_rel * max(1.0, float(np.max(np.abs(c))))) ** 2:
        raise DegenerateInput("[X, Y] vanished in the rank-1 branch")
    xz = bracket(c, x_vec, z_vec)
    beta = float(xz @ z_vec) / zn
    res_xz = float(np.linalg.norm(xz - beta * z_vec))
    res_yz = float(np.linalg.norm(bracket(c, y_vec, z_vec)))
    if beta < 0.0:
        x_vec, z_vec, beta = -x_vec, -z_vec, -beta
    return x_vec, y_vec, z_vec, 0.0, beta, {"xz": res_xz, "yz": res_yz}


def _canonicalize_rank2(triple, tol):
    c = triple.algebra.c
    gprime = triple.algebra.derived_basis(tol.rank_rel)  # (3, 2)
    h1, h2 = triple.h_basis
    # intersection of H and g': null space of [h1 h2 | -g'1 -g'2]
    m = np.stack([h1, h2, -gprime[:, 0], -gprime[:, 1]], axis=1)
    u, s, vt = np.linalg.svd(m)
    if s[2] <= tol.rank_rel * s[0]:
        raise DegenerateInput("H and g' intersect in more than a line")
    null = vt[3]
    y_coeff = null[:2]
    if math.sqrt(triple.inner(y_coeff, y_coeff)) <= tol.rank_rel:
        raise DegenerateInput("H and g' intersection is numerically empty")
    y_coeff = _metric_unit(triple, _sign_fix(y_coeff))
    x_coeff = _metric_unit(triple, _sign_fix(_metric_complement(triple, y_coeff)))

    x_vec = triple.h_vector(x_coeff)
    y_vec = triple.h_vector(y_coeff)
    z_vec = bracket(c, x_vec, y_vec)
    basis = np.stack([y_vec, z_vec], axis=1)
    if _numerical_rank(basis, tol.rank_rel) < 2:
        raise DegenerateInput("[X, Y] is parallel to Y in the rank-2 branch")
    xz = bracket(c, x_vec, z_vec)
    coef, res, _, _ = np.linalg.lstsq(basis, xz, rcond=None)
    alpha, beta = float(coef[0]), float(coef[1])
    res_xz = float(np.linalg.norm(basis @ coef - xz))
    res_yz = float(np.linalg.norm(bracket(c, y_vec, z_vec)))
    if beta < 0.0:
        x_vec, z_vec, beta = -x_vec, -z_vec, -beta
    return x_vec, y_vec, z_vec, alpha, beta, {"xz": res_xz, "yz": res_yz}


def regime_from_params(alpha: float, beta: float, zero_tol: float = 1e-12) -> Regime:
    """Build the regime record for given canonical parameters.

    ``alpha == 0`` selects the rank-1 family; in that family beta separates
    Heisenberg from the affine-type algebra.  For alpha != 0 the sign of the
    discriminant delta = beta^2 + 4*alpha decides the shape of ad_X on g'.
    """
    alpha = float(alpha)
    beta = float(beta)
    if beta < 0.0:
        raise ValueError("canonical beta must be >= 0")
    delta = beta * beta + 4.0 * alpha
    if alpha == 0.0:
        tag = "Rank1Heisenberg" if beta == 0.0 else "Rank1BetaPos"
        return Regime(tag=tag, alpha=alpha, beta=beta, delta=delta)
    scale = max(beta * beta, abs(4.0 * alpha), 1.0)
    if abs(delta) <= zero_tol * scale:
        return Regime(tag="DeltaZero", alpha=alpha, beta=beta, delta=0.0, lam=beta / 2.0)
    if delta > 0.0:
        rt = math.sqrt(delta)
        return Regime(
            tag="DeltaPos", alpha=alpha, beta=beta, delta=delta,
            lam1=(beta + rt) / 2.0, lam2=(beta - rt) / 2.0,
        )
    rho = beta / 2.0
    omega = math.sqrt(-delta) / 2.0
    return Regime(
        tag="DeltaNeg", alpha=alpha, beta=beta, delta=delta,
        rho=rho, omega=omega, theta0=math.atan2(rho, omega),
    )


def geometric_data(form: CanonicalForm) -> GeometricData:
    """Reeb field, torsion/curvature constants and connection table."""
    alpha, beta = form.alpha, form.beta
    reeb = -beta * form.Y + form.Z
    chris = np.zeros((3, 3, 3))  # frame order (X, Y, R)
    chris[0, 1] = (0.0, beta / 2.0, 0.0)   # nabla_X Y
    chris[1, 0] = (0.0, -beta, 0.0)        # nabla_Y X
    chris[2, 0] = (0.0, -alpha / 2.0, 0.0)  # nabla_R X
    chris[2, 1] = (alpha / 2.0, 0.0, 0.0)   # nabla_R Y
    return GeometricData(
        reeb=reeb,
        torsion_coeff=alpha / 2.0,
        ricci_constant=-(beta * beta + alpha / 2.0),
        chi=abs(alpha) / 2.0,
        kappa_ab=-beta * beta - alpha / 2.0,
        christoffel=chris,
    )


def canonicalize(
    triple: SubRiemannianTriple, tol: ToleranceProfile = DEFAULT_TOL
) -> tuple[CanonicalForm, Regime, GeometricData]:
    """Construct the canonical basis, parameters, regime and geometric constants."""
    report = validate(triple, tol)
    _raise_on_invalid(report)
    rank = triple.algebra.derived_rank(tol.rank_rel)
    if rank == 1:
        x, y, z, alpha, beta, res = _canonicalize_rank1(triple, tol)
    else:
        x, y, z, alpha, beta, res = _canonicalize_rank2(triple, tol)
    worst = max(res.values())
    if worst > tol.canonical_residual:
        raise DegenerateInput(f"canonical relations violated (residual {worst:.3e})")
    form = CanonicalForm(X=x, Y=y, Z=z, alpha=alpha, beta=beta, residuals=res)
    if rank == 1:
        # structural Heisenberg test: [g, g'] = 0 iff beta = 0
        c = triple.algebra.c
        gz = np.stack([bracket(c, np.eye(3)[i], z) for i in range(3)], axis=1)
        scale = max(1.0, float(np.max(np.abs(c))))
        nilpotent = bool(np.all(np.linalg.svd(gz / scale, compute_uv=False) <= tol.rank_rel))
        beta_eff = 0.0 if nilpotent else beta
        regime = regime_from_params(0.0, beta_eff)
        if nilpotent:
            form = CanonicalForm(X=x, Y=y, Z=z, alpha=0.0, beta=0.0, residuals=res)
    else:
        regime = regime_from_params(alpha, beta)
    return form, regime, geometric_data(form)


def characteristic_poly(alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient lists of the two classifying polynomials.

    Returns (ad_X restricted to g': lambda^2 - beta*lambda - alpha,
    full adjoint pi(X): -lambda^3 + beta*lambda^2 + alpha*lambda),
    highest degree first.
    """
    return (
        np.array([1.0, -beta, -alpha]),
        np.array([-1.0, beta, alpha, 0.0]),
    )


def almost_isomorphic(
    p1: tuple[float, float], p2: tuple[float, float], tol: float = 1e-9
) -> float | None:
    """Scale C > 0 with C*beta2 = beta1 and C^2*alpha2 = alpha1, if one exists.

    Returns 1.0 by convention when all four parameters vanish; None when the
    relations cannot be satisfied.  C == 1 iff the triples are isomorphic.
    """
    a1, b1 = float(p1[0]), float(p1[1])
    a2, b2 = float(p2[0]), float(p2[1])
    if b1 < 0 or b2 < 0:
        raise ValueError("canonical beta must be >= 0")
    scale_a = max(abs(a1), abs(a2), 1.0)
    scale_b = max(b1, b2, 1.0)

    def a_zero(a):
        return abs(a) <= tol * scale_a

    def b_zero(b):
        return abs(b) <= tol * scale_b

    if b_zero(b1) != b_zero(b2) or a_zero(a1) != a_zero(a2):
        return None
    if b_zero(b1) and a_zero(a1):
        return 1.0
    candidates = []
    if not b_zero(b1):
        candidates.append(b1 / b2)
    if not a_zero(a1):
        if a1 / a2 <= 0:
            return None
        candidates.append(math.sqrt(a1 / a2))
    c = candidates[0]
    for other in candidates[1:]:
        if abs(other - c) > tol * max(c, other):
            return None
    return c


def transform_triple(
    triple: SubRiemannianTriple, basis_change: np.ndarray, h_mix: np.ndarray | None = None
) -> SubRiemannianTriple:
    """Re-express the same structure in a new coordinate basis.

    ``basis_change`` has the new basis vectors as columns (old coordinates);
    coordinates of any fixed vector transform by its inverse.  ``h_mix``
    optionally replaces the spanning pair of H by an invertible 2x2
    recombination, with the metric transformed accordingly.
    """
    s = np.asarray(basis_change, dtype=float)
    s_inv = np.linalg.inv(s)
    c = triple.algebra.c
    c_new = np.einsum("pk,kij,im,jn->pmn", s_inv, c, s, s)
    h_new = triple.h_basis @ s_inv.T
    g_new = triple.metric
    if h_mix is not None:
        # new spanning pair h'_j = sum_i q[i,j] h_i; a vector with new
        # coefficients p' has old coefficients q p', so the metric becomes q^T G q
        q = np.asarray(h_mix, dtype=float)
        h_new = q.T @ h_new
        g_new = q.T @ g_new @ q
    return SubRiemannianTriple(LieAlgebra3(c_new), h_new, g_new)


def triple_from_json(text: str) -> SubRiemannianTriple:
    doc = json.loads(text)
    return SubRiemannianTriple(
        LieAlgebra3(np.asarray(doc["c"], dtype=float)),
        np.asarray(doc["H"], dtype=float),
        np.asarray(doc["metric"], dtype=float),
    )


def triple_to_json(triple: SubRiemannianTriple) -> str:
    return json.dumps(
        {
            "c": triple.algebra.c.tolist(),
            "H": triple.h_basis.tolist(),
            "metric": triple.metric.tolist(),
        }
    )
