"""Exception hierarchy shared by all modules."""


class UcmlError(Exception):
    """Base class for every error raised by the package."""


class MalformedSpaceError(UcmlError):
    pass


class SortError(UcmlError):
    pass


class NotMeasurableError(UcmlError):
    pass


class MalformedMeasureError(UcmlError):
    pass


class DomainError(UcmlError):
    pass


class UnboundedError(UcmlError):
    pass


class SchemaError(UcmlError):
    """Raised when an axiom or rule cannot be instantiated as requested."""


class ParseError(UcmlError):
    """Lexical or syntactic error, with the offending position in the input."""

    def __init__(self, message, pos=None, text=None):
        self.pos = pos
        self.text = text
        self.message = message
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class FormulaSortError(ParseError, SortError):
    """A formula that parses but is ill-sorted or uses a non-measurable operand."""


class ModelError(UcmlError):
    """A model file that fails validation; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SideConditionError(SchemaError):
    """A rule instance whose side condition fails; ``point`` witnesses the failure."""

    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)
