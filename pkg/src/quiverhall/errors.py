"""Exception types shared across the package."""


class QuiverHallError(Exception):
    """Base class for all errors raised by quiverhall."""


class QuiverParseError(QuiverHallError):
    """Bad quiver file. `code` is one of: syntax, unknown-vertex, non-dynkin."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class DimensionMismatchError(QuiverHallError):
    pass


class ContainmentError(QuiverHallError):
    """Claimed subspace is not contained in the claimed ambient space."""


class NotARootError(QuiverHallError):
    pass


class SearchExhaustedError(QuiverHallError):
    """Random search for an indecomposable hit its attempt bound."""


class InterpolationError(QuiverHallError):
    """Interpolation failed. `kind` is one of: insufficient-samples,
    non-integer, holdout-mismatch."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class InexactDivisionError(QuiverHallError):
    """Polynomial division left a remainder where exactness was required."""


class SliceConventionError(QuiverHallError):
    """Slice construction failed its dimension check; the block-side
    convention does not hold for this input."""


class InternalInvariantError(QuiverHallError):
    """A condition that is mathematically guaranteed failed; indicates a bug."""
