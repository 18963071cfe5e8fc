"""Exception types shared across the package."""


class CtplanError(Exception):
    """Base class for all errors raised by this package."""


class ProblemError(CtplanError):
    """Malformed LP/MILP input (bad index, NaN coefficient, inverted bounds)."""


class NumericalError(CtplanError):
    """The solver could not reach a numerically trustworthy conclusion."""


class UnboundedProblemError(CtplanError):
    """A MILP relaxation is unbounded; no finite optimum can be reported."""


class ConfigError(CtplanError):
    """A scenario configuration violates one of its invariants."""


class ModelError(CtplanError):
    """A planning model cannot be assembled from the given inputs."""


class ParseError(CtplanError):
    """A scenario file or LP dump file could not be parsed."""


class PlannerError(CtplanError):
    """A planning operation failed (mismatched inputs, violated postcondition)."""


class HorizonExhausted(PlannerError):
    """No feasible horizon exists at or below the requested upper limit."""

    def __init__(self, message, tau_upper=None):
        super().__init__(message)
        self.tau_upper = tau_upper


class NodeLimitReached(PlannerError):
    """The MILP node budget ran out before the search could finish."""
