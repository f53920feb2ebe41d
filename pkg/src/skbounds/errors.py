"""Exception hierarchy shared by every module."""


class SKBoundsError(Exception):
    pass


class AxisError(SKBoundsError, KeyError):
    """Unknown, duplicated or overlapping axis names."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ShapeError(SKBoundsError, ValueError):
    pass


class CapacityError(SKBoundsError, MemoryError):
    """A dense object would exceed the configured size cap."""


class ValidationError(SKBoundsError, ValueError):
    pass


class PreconditionError(SKBoundsError, ValueError):
    pass


class DegenerateCaseError(SKBoundsError, ZeroDivisionError):
    pass


class InfeasibleError(SKBoundsError):
    """LP or constraint set has no feasible point.

    ``certificate`` holds a Farkas-type dual vector when one is available.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class UnboundedError(SKBoundsError):
    pass


class ParseError(SKBoundsError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class RenormalizationWarning(UserWarning):
    pass
