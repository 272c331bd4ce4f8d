"""Periodic Mathieu functions ce_k, se_k and their characteristic values.

Eigenproblem route: inserting a Fourier series into

    w'' + (a - 2 q cos(2 theta)) w = 0

decouples into four infinite symmetric tridiagonal systems, one per parity
class (ce-even, ce-odd, se-even, se-odd).  Truncating at M coefficients and
diagonalizing gives the characteristic values a_k(q), b_k(q) and the Fourier
coefficients in one shot.  The ce-even class's first row is symmetrized with
a sqrt(2) scaling so the matrix stays symmetric; in those coordinates a unit
eigenvector reproduces the traditional normalization

    int_0^{2pi} ce_k^2 = int_0^{2pi} se_k^2 = pi .

At q = 0 the functions reduce to cos(k theta), sin(k theta) with
characteristic value k^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence

__all__ = ["MathieuFunction", "mathieu_char", "mathieu_function", "MathieuBasis", "mathieu_basis"]

_SQRT2 = math.sqrt(2.0)


def _class_of(kind: str, k: int) -> str:
    if kind == "ce" and k % 2 == 0:
        return "ce_even"
    if kind == "ce":
        return "ce_odd"
    if kind == "se" and k % 2 == 0:
        return "se_even"
    return "se_odd"


def _tridiag(cls: str, q: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    if cls == "ce_even":
        diag = (2.0 * np.arange(m)) ** 2
        off = np.full(m - 1, q)
        off[0] = _SQRT2 * q
    elif cls == "ce_odd":
        diag = (2.0 * np.arange(m) + 1.0) ** 2
        diag = diag.astype(float)
        diag[0] = 1.0 + q
        off = np.full(m - 1, q)
    elif cls == "se_even":
        diag = (2.0 * np.arange(m) + 2.0) ** 2
        off = np.full(m - 1, q)
    elif cls == "se_odd":
        diag = (2.0 * np.arange(m) + 1.0) ** 2
        diag = diag.astype(float)
        diag[0] = 1.0 - q
        off = np.full(m - 1, q)
    else:
        raise ValueError(cls)
    return diag.astype(float), off


def _frequencies(cls: str, m: int) -> np.ndarray:
    if cls == "ce_even":
        return 2.0 * np.arange(m)
    if cls == "se_even":
        return 2.0 * np.arange(m) + 2.0
    return 2.0 * np.arange(m) + 1.0


def _order_index(kind: str, k: int) -> int:
    # position of order k within its parity class's ascending eigenvalues
    if kind == "ce":
        return k // 2
    return (k - 2) // 2 if k % 2 == 0 else (k - 1) // 2


def _solve_class(cls: str, q: float, m: int):
    diag, off = _tridiag(cls, q, m)
    vals, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
    return vals, vecs


@dataclass(frozen=True)
class MathieuFunction:
    """One periodic Mathieu function as a truncated Fourier series."""

    kind: str  # "ce" or "se"
    k: int
    q: float
    char_value: float
    fourier_coeffs: np.ndarray  # coefficients of cos/sin(freq * theta)
    frequencies: np.ndarray
    truncation: int

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phases = np.multiply.outer(theta, self.frequencies)
        waves = np.cos(phases) if self.kind == "ce" else np.sin(phases)
        return waves @ self.fourier_coeffs

    def second_derivative(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phases = np.multiply.outer(theta, self.frequencies)
        waves = np.cos(phases) if self.kind == "ce" else np.sin(phases)
        return waves @ (-self.frequencies**2 * self.fourier_coeffs)

    def ode_residual(self, n_grid: int = 512) -> float:
        """sup-norm of w'' + (a - 2q cos 2theta) w over a uniform grid."""
        theta = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
        w = self(theta)
        r = self.second_derivative(theta) + (self.char_value - 2.0 * self.q * np.cos(2.0 * theta)) * w
        return float(np.max(np.abs(r)))


def _coeffs_from_vector(cls: str, vec: np.ndarray, k: int, kind: str) -> np.ndarray:
    coeffs = vec.copy()
    if cls == "ce_even":
        coeffs[0] /= _SQRT2  # undo the symmetrization: A0 = B0 / sqrt(2)
    freqs = _frequencies(cls, coeffs.size)
    idx = int(np.argmin(np.abs(freqs - k)))
    anchor = coeffs[idx] if abs(coeffs[idx]) > 1e-12 else coeffs[int(np.argmax(np.abs(coeffs)))]
    if anchor < 0:
        coeffs = -coeffs
    return coeffs


def mathieu_char(q: float, k: int, kind: str, truncation: int = 32, tol: float = 1e-10) -> float:
    """Characteristic value a_k(q) (kind="ce") or b_k(q) (kind="se").

    The truncation is doubled until two successive values agree to ``tol``;
    failing twice raises NoConvergence.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    if kind not in ("ce", "se"):
        raise ValueError("kind must be 'ce' or 'se'")
    if k < 0 or (kind == "se" and k < 1):
        raise ValueError("order out of range")
    cls = _class_of(kind, k)
    idx = _order_index(kind, k)
    m = max(truncation, idx + 8)
    prev = None
    for _ in range(4):
        vals, _ = _solve_class(cls, q, m)
        cur = float(vals[idx])
        if prev is not None and abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev, m = cur, 2 * m
    raise NoConvergence(f"{kind}_{k}({q}) did not stabilize at truncation {m}")


def mathieu_function(q: float, k: int, kind: str, truncation: int = 32) -> MathieuFunction:
    cls = _class_of(kind, k)
    idx = _order_index(kind, k)
    m = max(truncation, idx + 8)
    char = mathieu_char(q, k, kind, truncation=m)  # convergence guard
    vals, vecs = _solve_class(cls, q, m)
    coeffs = _coeffs_from_vector(cls, vecs[:, idx], k, kind)
    return MathieuFunction(
        kind=kind,
        k=k,
        q=q,
        char_value=char,
        fourier_coeffs=coeffs,
        frequencies=_frequencies(cls, m),
        truncation=m,
    )


@dataclass(frozen=True)
class MathieuBasis:
    """All ce_k (k < n_modes) and se_k (1 <= k < n_modes) at one q."""

    q: float
    ce: tuple[MathieuFunction, ...]
    se: tuple[MathieuFunction, ...]

    def char_table(self) -> list[tuple[int, float, float | None]]:
        rows = []
        for k in range(len(self.ce)):
            b = self.se[k - 1].char_value if 1 <= k <= len(self.se) else None
            rows.append((k, self.ce[k].char_value, b))
        return rows


def mathieu_basis(q: float, n_modes: int, truncation: int = 32) -> MathieuBasis:
    """Solve each parity class once and slice out the leading modes."""
    m = max(truncation, n_modes + 8)
    out = {}
    for cls in ("ce_even", "ce_odd", "se_even", "se_odd"):
        out[cls] = _solve_class(cls, q, m)
    ce = []
    for k in range(n_modes):
        cls = _class_of("ce", k)
        idx = _order_index("ce", k)
        vals, vecs = out[cls]
        ce.append(
            MathieuFunction(
                "ce", k, q, float(vals[idx]),
                _coeffs_from_vector(cls, vecs[:, idx], k, "ce"),
                _frequencies(cls, m), m,
            )
        )
    se = []
    for k in range(1, n_modes):
        cls = _class_of("se", k)
        idx = _order_index("se", k)
        vals, vecs = out[cls]
        se.append(
            MathieuFunction(
                "se", k, q, float(vals[idx]),
                _coeffs_from_vector(cls, vecs[:, idx], k, "se"),
                _frequencies(cls, m), m,
            )
        )
    return MathieuBasis(q=q, ce=tuple(ce), se=tuple(se))
