"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI
when reporting failures.
"""


class WalksError(Exception):
    code = "error"
    exit_status = 2


class ValidationError(WalksError):
    code = "validation"
    exit_status = 2


class ZeroStepError(ValidationError):
    code = "zero-step"


class SpanViolationError(ValidationError):
    """The steps fit inside a closed half-space through the origin."""

    code = "span-violation"

    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__(
            "no step descends in direction u=%r (stepset fits in a closed "
            "half-space)" % (self.witness,)
        )


class NonPositivePointError(ValidationError):
    code = "non-positive-point"


class NoConvergenceError(WalksError):
    code = "no-convergence"
    exit_status = 2

    def __init__(self, message, last_iterate=None, residual=None):
        self.last_iterate = last_iterate
        self.residual = residual
        super().__init__(message)


class OrthantNotContainedError(ValidationError):
    """The derived half-space would not contain the first orthant."""

    code = "orthant-not-contained"


class DegenerateProjectionError(ValidationError):
    """Projection produced only nonnegative (or only nonpositive) 1D steps."""

    code = "degenerate-projection"


class DegenerateStepsetError(ValidationError):
    code = "degenerate-stepset"


class DivergentError(WalksError):
    """GF iteration diverged: the evaluation point is past the radius."""

    code = "divergent"


class AttemptsExhaustedError(WalksError):
    code = "attempts-exhausted"
    exit_status = 3

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class UnknownAtomError(ValidationError):
    code = "unknown-atom"


class BudgetExceededError(ValidationError):
    code = "budget-exceeded"


class ImpossibleEndpointError(WalksError):
    """A sampled walk ended at a point the exact count says is unreachable."""

    code = "impossible-endpoint"


class UnknownFormatError(ValidationError):
    code = "unknown-format"


class DegenerateHullError(WalksError):
    """All points coplanar or collinear; no 3D hull exists."""

    code = "degenerate-hull"

    def __init__(self, points):
        self.points = list(points)
        super().__init__("point set is degenerate (no full-dimensional hull)")


class ParseError(ValidationError):
    code = "parse-error"
