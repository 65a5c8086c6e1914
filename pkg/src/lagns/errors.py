"""Exception hierarchy."""


class LagnsError(Exception):
    """Base class for all package errors."""


class DomainError(LagnsError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidInitialData(LagnsError, ValueError):
    """Initial profiles violate positivity."""


class IncompatibleData(LagnsError, ValueError):
    """Initial profiles violate far-field or wall compatibility."""


class StepFailure(LagnsError, RuntimeError):
    """The adaptive step controller could not find an admissible step."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SolverBreakdown(LagnsError, RuntimeError):
    """A tridiagonal system lost diagonal dominance."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class OracleUnstable(LagnsError, RuntimeError):
    """The explicit reference integration blew up; shrink its time step."""


class ConfigError(LagnsError, ValueError):
    """A run configuration could not be parsed or validated."""
