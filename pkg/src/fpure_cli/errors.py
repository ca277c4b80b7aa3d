"""
Exceptions raised by fpure-cli. Each carries the process exit code the CLI reports.
"""


class FPureError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    exit_code = 2


class InputError(FPureError):
    """The user supplied something malformed or outside the supported range."""

    exit_code = 2


class PolynomialSyntaxError(InputError):
    """Raised by the expression parser; `position` is the 0-based offset of the fault."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariableError(InputError):
    pass


class ExponentOverflowError(InputError):
    pass


class FieldError(InputError):
    pass


class PreconditionError(InputError):
    pass


class PresentationError(InputError):
    pass


class EmptyVarietyError(InputError):
    pass


class JobSpecError(InputError):
    pass


class FieldDivisionError(FPureError, ZeroDivisionError):
    def __init__(self, message="division by zero in 𝔽_p"):
        super().__init__(message)


class NotFPureError(FPureError):
    """A threshold was requested for a ring that is not F-pure."""

    exit_code = 1


class BudgetExhaustedError(FPureError):
    exit_code = 3

    def __init__(self, message="computation budget exhausted"):
        super().__init__(message)


class InternalError(FPureError):
    exit_code = 4
