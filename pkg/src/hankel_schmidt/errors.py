"""Exception and warning types shared across the package."""


class HankelSchmidtError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(HankelSchmidtError, ValueError):
    pass


class AliasingError(HankelSchmidtError, ValueError):
    """Requested output window cannot hold the full product."""


class WindowExceeded(HankelSchmidtError, ValueError):
    """Input function has coefficients beyond the truncation window."""


class NotSymmetric(HankelSchmidtError, ValueError):
    """Operation requires a symbol with U = U^t."""


class NotSymmetricWarning(UserWarning):
    pass


class ZeroOnCircle(HankelSchmidtError, ValueError):
    pass


class NotHermitian(HankelSchmidtError, ValueError):
    pass


class NotAnEigenvector(HankelSchmidtError, ValueError):
    pass


class AmbiguousClustering(HankelSchmidtError):
    """Two singular value clusters are too close to separate reliably."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class NotApplicable(HankelSchmidtError):
    """Check does not apply to this instance (e.g. wandering dimension < m)."""


class GridSingularity(HankelSchmidtError):
    """A pointwise inverse on the grid is numerically singular."""


class NotInvariant(HankelSchmidtError):
    pass


class NotInner(HankelSchmidtError):
    pass


class SpecError(HankelSchmidtError, ValueError):
    """Malformed symbol specification file; ``offset`` is a byte offset when known."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset
