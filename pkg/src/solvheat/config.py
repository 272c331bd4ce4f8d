"""Tolerance knobs used by the classification and validation code."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceProfile:
    """Every tolerance used by :mod:`solvheat.algebra` in one record.

    Rank decisions are relative to the largest singular value because the
    structure constants are user input of order one.
    """

    antisymmetry: float = 1e-12
    jacobi: float = 1e-12
    rank_rel: float = 1e-10
    metric_spd_min: float = 1e-12
    hormander_rel: float = 1e-10
    canonical_residual: float = 1e-9
    coefficient_solve: float = 1e-9


DEFAULT_TOL = ToleranceProfile()
