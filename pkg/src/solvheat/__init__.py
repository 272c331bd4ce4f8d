"""Sub-Riemannian heat kernels on 3-d solvable Lie groups.

Classification into canonical parameters (alpha, beta), affine matrix
representations, three independent heat-kernel engines (Brownian-bridge
Monte Carlo, Mathieu spectral series on SE(2), Fourier-ODE solver), and
numerical verification of curvature-dimension and semigroup gradient bounds.
"""

__version__ = "0.1.0"

from .algebra import (
    CanonicalForm,
    GeometricData,
    LieAlgebra3,
    Regime,
    SubRiemannianTriple,
    almost_isomorphic,
    canonicalize,
    characteristic_poly,
    regime_from_params,
    validate,
)
from .presets import canonical_triple, preset_params, preset_triple
from .representation import (
    AffineRep,
    GroupPoint,
    build_rep,
    exp2x2,
    field_coeffs,
    group_inv,
    group_mul,
    rep_from_params,
)

__all__ = [
    "CanonicalForm",
    "GeometricData",
    "LieAlgebra3",
    "Regime",
    "SubRiemannianTriple",
    "almost_isomorphic",
    "canonicalize",
    "characteristic_poly",
    "regime_from_params",
    "validate",
    "canonical_triple",
    "preset_params",
    "preset_triple",
    "AffineRep",
    "GroupPoint",
    "build_rep",
    "exp2x2",
    "field_coeffs",
    "group_inv",
    "group_mul",
    "rep_from_params",
]
