"""Exception types raised on precondition violations.

Construction rejections (ADDC/ADD4) are returned as values, see
``app.models.schemas.Rejection``.
"""


class LensBallError(ValueError):
    """Base class for all domain errors."""


class InvalidFractionError(LensBallError):
    pass


class InvalidLensError(LensBallError):
    pass


class InvalidBallError(LensBallError):
    pass


class InvalidNodeError(LensBallError):
    pass


class FamilyEquationError(LensBallError):
    """A slide-tree node fails the equations of its family."""


class FixtureError(LensBallError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
