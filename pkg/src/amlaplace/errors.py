"""Exception types shared across the library."""


class AmlaplaceError(Exception):
    """Base class for all library errors."""


class NegativeCoefficient(AmlaplaceError):
    """A series coefficient is negative beyond the clamping threshold."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"coefficient a_{index} = {value} is negative")


class OrderExceedsTruncation(AmlaplaceError):
    """A requested derivative or split order exceeds the stored truncation."""


class NonPositiveLambda(AmlaplaceError):
    """A weight exponent that must be positive is zero or negative."""


class OffsetNotZero(AmlaplaceError):
    """Operation requires an inverse-power series with offset zero."""


class DivergentAt(AmlaplaceError):
    """Series evaluation detected term growth at the requested point."""

    def __init__(self, x):
        self.x = x
        super().__init__(f"series terms do not decay at x = {x}")


class DerivativeUnavailable(AmlaplaceError):
    """The supplied function object does not support differentiation."""


class CertificateInsufficient(AmlaplaceError):
    """Growth certificate too weak to bound an integral tail."""


class ToleranceUnreachable(AmlaplaceError):
    """Requested tolerance cannot be met with the current settings."""


class IndexOutOfRange(AmlaplaceError):
    """Table or recursion index outside its valid range."""


class SpecParseError(AmlaplaceError):
    """Malformed input specification (JSON or closed-form expression)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        elif column is not None:
            where = f" at column {column}"
        super().__init__(message + where)
