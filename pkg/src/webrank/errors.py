"""Exception hierarchy shared by all modules."""


class WebError(Exception):
    """Base class for every error raised by webrank."""


class NumVarsMismatch(WebError, ValueError):
    pass


class ZeroConstantTerm(WebError, ZeroDivisionError):
    pass


class NonvanishingArgument(WebError, ValueError):
    pass


class SingularJacobian(WebError, ValueError):
    pass


class SingularAtOrigin(WebError, ValueError):
    pass


class OrderExceedsReliable(WebError, ValueError):
    """A verdict was requested beyond the degree the data is reliable to."""


class DegreeOverflow(WebError, ValueError):
    pass


class NotClosed(WebError):
    """A form expected to be closed has a nonzero exterior derivative.

    ``witness`` holds the first nonzero coefficient found.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SingularFrame(WebError):
    pass


class DegeneratePosition(WebError):
    pass


class GeneralPositionError(WebError):
    def __init__(self, message, subset=None):
        super().__init__(message)
        self.subset = subset


class NotFlatError(WebError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class VanishingAtOrigin(WebError, ValueError):
    pass


class DegenerateTriple(WebError):
    pass


class NotBasic(WebError):
    pass


class DegenerateWeb(WebError, ValueError):
    pass


class ParseError(WebError, ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class OrderTooLowForExactness(UserWarning):
    """Verdict is only valid through the reported order, not exactly."""
