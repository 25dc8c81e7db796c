"""Exception hierarchy shared by all modules."""


class TorsionLabError(Exception):
    """Base class for library errors."""


class DimensionError(TorsionLabError, ValueError):
    """Array shapes do not agree with the algebra dimension."""


class InvalidAlgebraError(TorsionLabError, ValueError):
    """Structure constants violate antisymmetry or the Jacobi identity."""


class NotClosedError(TorsionLabError, ValueError):
    """Matrix generators do not span a subalgebra."""


class DegenerateError(TorsionLabError, ValueError):
    """A basis, frame or set of generators is linearly dependent."""


class NotAbelianIdealError(TorsionLabError, ValueError):
    """Subspace fails to be an abelian ideal."""


class NotPositiveDefiniteError(TorsionLabError, ValueError):
    """Metric (or bilinear form) is not positive definite."""
