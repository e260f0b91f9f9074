"""Exception hierarchy shared by all popmatch modules."""


class PopmatchError(Exception):
    """Base class for every error raised by popmatch."""


class ParseError(PopmatchError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(PopmatchError):
    pass


class AlreadyAugmented(PopmatchError):
    pass


class BadParameters(PopmatchError):
    pass


class NotAnEdge(PopmatchError):
    pass


class VertexReused(PopmatchError):
    pass


class NotAPerfect(PopmatchError):
    pass


class NotMaximum(PopmatchError):
    """A matching claimed to be maximum admits an augmenting path."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(message)


class NotAlternating(PopmatchError):
    pass


class WouldDoubleMatch(PopmatchError):
    pass


class Infeasible(PopmatchError):
    pass


class StructuralPreconditionViolated(PopmatchError):
    pass


class OptimalityPreconditionViolated(PopmatchError):
    pass


class InvalidWitness(PopmatchError):
    pass


class TooLarge(PopmatchError):
    pass
