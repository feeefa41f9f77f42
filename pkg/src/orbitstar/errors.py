"""Exception hierarchy shared by all orbitstar modules."""


class OrbitStarError(Exception):
    """Base class for every error raised by the package."""


class UsageError(OrbitStarError, ValueError):
    """Caller violated a precondition (mismatched sizes, bad index, ...)."""


class ParseError(OrbitStarError, ValueError):
    """Malformed expression or document.

    ``offset`` is a byte offset into the expression text (or ``None``);
    ``location`` is a free-form location such as ``"line 3, column 5"``.
    """

    def __init__(self, message, offset=None, location=None):
        self.message = message
        self.offset = offset
        self.location = location
        where = ""
        if offset is not None:
            where = f" at offset {offset}"
        elif location is not None:
            where = f" at {location}"
        super().__init__(f"{message}{where}")


class ValidationError(OrbitStarError):
    """Algebra or fixture data failed an exact consistency check."""

    def __init__(self, identity, details):
        self.identity = identity
        self.details = details
        super().__init__(f"{identity} violated: {details}")


class DomainError(OrbitStarError, ValueError):
    """Numerical evaluation outside the domain of a function or cover."""


class InternalError(OrbitStarError, RuntimeError):
    """An invariant that should hold by construction failed."""
