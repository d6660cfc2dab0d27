"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation/config problems exit 1,
data parse problems exit 2. Partial failures (some images skipped) are
reported in-band and exit 3.
"""


class PotholevalError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PotholevalError):
    """An input value violates a documented invariant or precondition."""


class ShapeError(ValidationError):
    """Array dimensions or channel counts do not match what an operation needs."""


class ParseError(PotholevalError):
    """A text or binary input could not be decoded.

    Carries the 1-based line number and source path when known so the CLI
    can point at the offending record.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class FormatError(ParseError):
    """A binary raster file has a malformed or unsupported layout."""


class NumericalGuardError(PotholevalError):
    """A numeric computation left the domain its guards can rescue."""
