"""Named parameter presets and canonical-basis triples for them."""

from __future__ import annotations

import re

import numpy as np

from .algebra import LieAlgebra3, SubRiemannianTriple

__all__ = ["PRESET_NAMES", "preset_params", "canonical_triple", "preset_triple"]

PRESET_NAMES = ("heisenberg", "se2", "solv-minus", "rank1-beta", "delta-zero")

_PARAM_RE = re.compile(r"^([a-z0-9-]+?)(?:\(([-0-9.eE+]+)\))?$")


def preset_params(name: str) -> tuple[float, float]:
    """(alpha, beta) for a preset name.

    ``rank1-beta(b)`` and ``delta-zero(lam)`` take an optional argument,
    defaulting to 1; e.g. ``delta-zero(2)`` gives (alpha, beta) = (-4, 4).
    """
    m = _PARAM_RE.match(name.strip().lower())
    if not m:
        raise ValueError(f"unrecognized preset {name!r}")
    base, arg = m.group(1), m.group(2)
    value = float(arg) if arg is not None else 1.0
    if base == "heisenberg":
        return (0.0, 0.0)
    if base == "se2":
        return (-1.0, 0.0)
    if base == "solv-minus":
        return (1.0, 0.0)
    if base == "rank1-beta":
        if value <= 0:
            raise ValueError("rank1-beta requires beta > 0")
        return (0.0, value)
    if base == "delta-zero":
        if value <= 0:
            raise ValueError("delta-zero requires lambda > 0")
        return (-value * value, 2.0 * value)
    raise ValueError(f"unknown preset {base!r}; choose from {PRESET_NAMES}")


def canonical_triple(alpha: float, beta: float) -> SubRiemannianTriple:
    """Triple written directly in a canonical basis (e1, e2, e3) = (X, Y, Z)."""
    c = np.zeros((3, 3, 3))
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0          # [X, Y] = Z
    c[1, 0, 2], c[1, 2, 0] = alpha, -alpha       # [X, Z] = alpha Y + beta Z
    c[2, 0, 2], c[2, 2, 0] = beta, -beta
    return SubRiemannianTriple(
        LieAlgebra3(c),
        h_basis=np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        metric=np.eye(2),
    )


def preset_triple(name: str) -> SubRiemannianTriple:
    return canonical_triple(*preset_params(name))
