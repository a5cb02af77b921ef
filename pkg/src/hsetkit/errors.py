"""Exception hierarchy shared by all modules."""


class HSetKitError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(HSetKitError, ValueError):
    pass


class NotSymmetric(HSetKitError, ValueError):
    pass


class NotPositiveDefinite(HSetKitError, ValueError):
    pass


class DegeneratePoints(HSetKitError, ValueError):
    """Kernel matrix on the point set is numerically singular (duplicate points)."""


class PointTooClose(HSetKitError, ValueError):
    """The new point lies (numerically) on the existing data set."""


class EmptyInput(HSetKitError, ValueError):
    pass


class MaxIterations(HSetKitError, RuntimeError):
    """Simplex iteration cap reached."""


class EmptySupport(HSetKitError, ValueError):
    """Minimax error is zero, so there are no extremal points."""


class NotAnHSet(HSetKitError, ValueError):
    pass


class EmptySelection(HSetKitError, ValueError):
    pass


class ExhaustedCandidates(HSetKitError, ValueError):
    pass
