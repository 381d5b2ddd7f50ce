"""Exception types shared across the package.

Two broad families matter to callers: :class:`ValidationError` subclasses
signal bad or infeasible *input* (wrong shapes, degenerate geometry,
impossible mass budgets), while :class:`NumericalError` subclasses signal
that a computation could not be completed or lies outside its guaranteed
tolerance.  The command-line tools map the former to exit code 2 and the
latter to exit code 3.
"""


class WFermatError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WFermatError):
    """Invalid or infeasible input."""


class NumericalError(WFermatError):
    """A computation failed, degenerated, or fell outside tolerance."""


class DegenerateSegment(ValidationError):
    """Two points that should be distinct coincide within tolerance."""


class DegeneratePlane(ValidationError):
    """Three points that should span a plane are (near-)collinear."""


class DegenerateEdge(ValidationError):
    """The endpoints of an edge coincide within tolerance."""


class PointOnEdge(ValidationError):
    """A point that must lie off an edge's supporting line lies on it."""


class InvalidConfiguration(ValidationError):
    """A boundary configuration violates its structural invariants."""


class AtVertex(ValidationError):
    """The query point coincides with a boundary vertex."""


class MaxIterationsExceeded(NumericalError):
    """The iterative solver ran out of iterations.

    Carries the best iterate seen so far in ``best_point`` and its
    first-order residual in ``kkt_residual``.
    """

    def __init__(self, message, best_point=None, kkt_residual=None):
        super().__init__(message)
        self.best_point = best_point
        self.kkt_residual = kkt_residual


class Unrealizable(ValidationError):
    """An angle system admits no realization by actual rays."""


class RootOutOfRange(NumericalError):
    """A cosine root fell outside [-1, 1] by more than the clamp margin."""


class NoMatchingRoot(NumericalError):
    """Neither quadratic root matches the reconstructed geometry."""


class NotInterior(ValidationError):
    """The junction point is not strictly interior to the required hull."""


class NotCoplanar(ValidationError):
    """Points required to lie in a common plane do not."""


class InvalidMassBudget(ValidationError):
    """The total mass does not exceed the residual mass."""


class NonpositiveWeight(NumericalError):
    """The requested configuration admits no strictly positive weights."""


class BudgetInconsistent(ValidationError):
    """The produced weights do not sum to the requested total mass."""


class InfeasibleSplit(ValidationError):
    """A requested mass-flow split violates nonnegativity or balance."""


class DegenerateProjection(NumericalError):
    """A projected-angle sine in a denominator vanishes."""


class SignDegenerate(NumericalError):
    """A plane-side sign in a denominator of the plasticity equations is 0."""


class FloatingViolated(NumericalError):
    """A re-scaled configuration no longer passes the floating test.

    ``vertex`` names the (1-based) vertex at which the test failed.
    """

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class EvaluationFailed(NumericalError):
    """A user-supplied function could not be evaluated on the stencil."""


class EmptyFeasibleInterval(NumericalError):
    """No value of the free weight keeps every weight positive."""


class DocumentError(ValidationError):
    """A problem document fails schema validation.

    ``field`` points at the offending entry, e.g. ``"parameters.weights"``.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
