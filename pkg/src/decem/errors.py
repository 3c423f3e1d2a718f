"""Exception hierarchy shared by the library and the CLI."""


class DecemError(Exception):
    """Base class for all library errors."""


class ModelError(DecemError, ValueError):
    """A model or policy is malformed or does not match the spaces it is used with."""


class ParseError(DecemError, ValueError):
    """A problem or policy document could not be parsed."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class NumericError(DecemError, ArithmeticError):
    """A numerical computation failed (singular system, non-finite values)."""


class ResourceError(DecemError, RuntimeError):
    """An iteration budget or hard cap was exceeded.

    ``partial`` carries whatever was computed before the cap was hit.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
