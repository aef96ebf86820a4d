"""Exception hierarchy shared by every p2race module."""


class P2RaceError(Exception):
    """Base class for all library errors."""


class InvalidDiscriminantError(P2RaceError, ValueError):
    pass


class OutOfRangeError(P2RaceError, ValueError):
    """A query point lies beyond the data it needs (usually the sieve limit)."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ResourceLimitError(P2RaceError, MemoryError):
    pass


class UndefinedRatioError(P2RaceError, ZeroDivisionError):
    pass


class DomainError(P2RaceError, ValueError):
    pass


class SingularRangeError(P2RaceError, ValueError):
    """The quadrature range meets points where log|f| is not bounded away from 0."""

    def __init__(self, message, interval):
        super().__init__(message)
        self.interval = interval
