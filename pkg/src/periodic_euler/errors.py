"""Exception hierarchy shared by the solvers, diagnostics and the CLI."""


class EulerError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(EulerError):
    exit_code = 2


class ValidationError(EulerError, ValueError):
    exit_code = 3


class DomainError(ValueError):
    """A state outside the smooth-solution domain (rho <= 0, s <= r)."""


class SolverError(EulerError):
    exit_code = 4

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class CFLError(SolverError):
    pass


class SupersonicityLoss(SolverError):
    pass


class NonFiniteError(SolverError):
    pass


class PositivityError(SolverError):
    pass


class WindowTooShort(EulerError, ValueError):
    exit_code = 4
