"""Exception hierarchy shared by all modlag modules."""


class ModlagError(Exception):
    """Base class for all numeric failures raised by this package."""


class PoleOfGamma(ModlagError):
    """Gamma evaluated within tolerance of a nonpositive integer."""


class NoConvergence(ModlagError):
    """An iterative scheme hit its cap before meeting tolerance."""


class PrecisionExhausted(ModlagError):
    """Precision escalation reached max_bits without stabilization."""


class OnCut(ModlagError):
    """Weight evaluated on the branch cut [0, infinity)."""


class UnsupportedClosedForm(ModlagError):
    """Closed-form moments requested with 2b not a nonnegative integer."""


class ExcludedNu(ModlagError):
    """nu is a nonnegative integer, outside the supported family."""


class PathCrossesCut(ModlagError):
    """An integration path crosses a branch cut of the integrand."""


class TraceStalled(ModlagError):
    """Level-curve corrector failed to converge."""


class AtPole(ModlagError):
    """A closed-form solution was evaluated at one of its poles."""


class UnsupportedB(ModlagError):
    """Closed-form solutions exist only for b in {0, 1/2, 1}."""


class DivisionNearZero(ModlagError):
    """A denominator fell below tolerance where no removable limit applies."""


class DegenerateKNu(ModlagError):
    """K(s) = nu within tolerance; the Schlesinger map degenerates."""


class MissingY(ModlagError):
    """An operation needed the y function but none was attached."""


class ZeroScale(ModlagError):
    """Stokes-multiplier scaling constant d must be nonzero."""


class StepUnderflow(ModlagError):
    """ODE step size shrank below representable resolution."""


class ExistenceFailure(ModlagError):
    """A leading Hankel determinant vanished; orthogonality degenerates."""

    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"existence failure at degree {degree}")


class RequiresBZero(ModlagError):
    """Exact Laguerre formulas require b = 0."""


class AtPoleOfU(ModlagError):
    """L is a pole of the underlying PIV solution."""


class DegenerateFit(ModlagError):
    """Too few or invalid points for a least-squares order fit."""
