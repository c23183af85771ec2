"""Exceptions raised by brsfading

All of them derive from the builtin exception a caller would expect, so code that
only catches ``ValueError`` or ``ArithmeticError`` keeps working.
"""


class ParameterError(ValueError):
    """A field of a parameter record or scenario is out of bounds"""

    def __init__(self, field, value, requirement):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value} is invalid: {requirement}")


class DomainError(ValueError):
    """Argument outside the domain of a special function or transform"""


class DegenerateBranchError(ValueError):
    """The regular formulas cannot be used for this correlation coefficient"""


class AccuracyError(ArithmeticError):
    """A numerical procedure did not reach its accuracy target"""

    def __init__(self, message, *, estimates=None, nodes=None):
        self.estimates = estimates
        self.nodes = nodes
        super().__init__(
            f"{message}"
            f"{'' if estimates is None else ' (last estimates ' + str(estimates) + ')'}"
        )


class UndefinedFadeDurationError(ArithmeticError):
    """The level crossing rate is zero, so no finite fade duration exists"""
