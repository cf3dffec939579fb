"""Exception hierarchy shared by every htensor module."""


class HTensorError(Exception):
    """Base class for all library errors."""


class ShapeMismatchError(HTensorError, ValueError):
    """Operand extents or orders are incompatible with the operation."""


class SizeLimitError(HTensorError, ValueError):
    """A cost guard was tripped (factorial or exponential blow-up)."""


class FormatError(HTensorError, ValueError):
    """A serialized tensor could not be decoded."""


class MalformedHeaderError(FormatError):
    pass


class EntryCountError(FormatError):
    pass


class NonFiniteEntryError(FormatError):
    pass


class SingularError(HTensorError, ArithmeticError):
    """The normal-square matrix of an even-order tensor is numerically singular."""

    def __init__(self, message="Singular", pivot=None, scale=None):
        super().__init__(message)
        self.pivot = pivot
        self.scale = scale


class NotAntisymmetricError(HTensorError, ValueError):
    """Input that must be antisymmetric is not, within tolerance."""

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation
