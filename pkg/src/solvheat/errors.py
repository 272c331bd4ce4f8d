"""Exception types shared across the package."""


class SolvheatError(Exception):
    """Base class for all package-specific errors."""


class InvalidAlgebra(SolvheatError):
    """Structure constants violate antisymmetry or the Jacobi identity."""


class NotSolvable(SolvheatError):
    """The second derived subalgebra does not vanish."""


class NotHormander(SolvheatError):
    """H + [H, H] fails to span the algebra."""


class DegenerateInput(SolvheatError):
    """A rank/intersection computation is numerically ill-posed."""


class RegimeMismatch(SolvheatError):
    """Parameters passed to a regime-specific routine belong to another regime."""


class NonFiniteError(SolvheatError):
    """A numerical evaluation overflowed or produced NaN."""


class TooManyRejections(SolvheatError):
    """More than the allowed fraction of Monte Carlo samples hit the determinant floor."""


class NoConvergence(SolvheatError):
    """An iterative refinement failed to reach its tolerance."""


class BoundaryMassLeak(SolvheatError):
    """The PDE solution is not negligible at the truncated domain boundary."""


class WindowExceeded(SolvheatError):
    """A time horizon lies outside the admissible window of a bound."""


class ClassOverflow(SolvheatError):
    """A symbolic computation grew beyond the configured term budget."""


class TruncationWarning(UserWarning):
    """A quadrature or series cutoff may be too aggressive."""
