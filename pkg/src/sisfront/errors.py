"""Exception hierarchy shared by the solvers and the command line."""


class SisFrontError(Exception):
    """Base class for all package errors."""


class ExpressionError(SisFrontError):
    """A coefficient expression failed to parse or evaluate."""


class ValidationError(SisFrontError):
    """A model or run configuration violates its invariants."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NumericError(SisFrontError):
    """A numerical kernel failed to converge or produced unusable output."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StepFailure(NumericError):
    """A single time step was rejected; the caller may retry with a smaller dt."""


class InvariantViolation(NumericError):
    """A discrete invariant was violated beyond its tolerance."""


class BracketError(SisFrontError):
    """A root or threshold bracket does not enclose a sign change."""


class InconclusiveProbeError(SisFrontError):
    """A classification probe stayed undetermined after horizon extension."""

    def __init__(self, message, mu):
        super().__init__(message)
        self.mu = mu


class WindowError(SisFrontError):
    """A requested spatial window is not contained in the infected interval."""
