"""Exception hierarchy shared by all hwlab modules."""


class HWLabError(Exception):
    """Base class for every error raised by hwlab."""


class InvalidArgument(HWLabError, ValueError):
    pass


class InvalidForm(InvalidArgument):
    """A closed-form function was given parameters outside its domain."""


class GridMismatch(HWLabError, ValueError):
    pass


class NotInL2(HWLabError, ValueError):
    """The requested function or chain member is not square integrable."""


class NotAnEigenvalue(HWLabError, ValueError):
    pass


class NotIntegrable(HWLabError, ValueError):
    pass


class DegenerateChain(HWLabError, ArithmeticError):
    pass


class GluingViolation(HWLabError, ValueError):
    """A symbol pair whose two halves disagree at the junction point 0."""


class IndexUndefined(HWLabError, ValueError):
    """The spectral parameter lies on the essential spectrum."""


class InvalidSupports(HWLabError, ValueError):
    pass


class NotInAlgLat(HWLabError, ValueError):
    """The kernel does not vanish above the diagonal."""


class KernelFormatError(HWLabError, ValueError):
    pass


class WordSyntaxError(HWLabError, ValueError):
    """Raised by the operator-word parser; carries the offending position."""

    def __init__(self, message, text="", position=0):
        super().__init__(message)
        self.message = message
        self.text = text
        self.position = position

    def caret(self):
        return f"{self.text}\n{' ' * self.position}^ {self.message}"

    def __str__(self):
        return f"{self.message} at position {self.position}"
