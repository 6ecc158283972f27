"""Exception hierarchy shared by the whole package."""


class EllCommuteError(Exception):
    """Base class for all package errors."""


class UsageError(EllCommuteError, ValueError):
    """Inputs violate a documented precondition (mismatched variables, bad shapes, ...)."""


class NumericalBreakdown(EllCommuteError, ArithmeticError):
    """A numerical procedure could not deliver the requested accuracy."""


class PrecisionError(NumericalBreakdown):
    """A coefficient outside the known precision window was requested or needed."""


class SingularSeriesError(NumericalBreakdown):
    """Inversion or division by a series whose leading coefficient is not a unit."""


class PoleError(UsageError):
    """Evaluation point lies on (or too close to) the pole set."""


class NotCommutingError(EllCommuteError):
    """An operator pair that was required to commute does not."""


class BranchPointError(NumericalBreakdown):
    """Eigenvalues coincide to tolerance (ramification point of the spectral cover)."""


class OffCurveError(UsageError):
    """A point that was required to lie on the spectral curve does not."""


class ClearanceError(UsageError):
    """A continuation path comes too close to the pole set."""


class StepCollapseError(NumericalBreakdown):
    """The adaptive integrator's step size collapsed."""
