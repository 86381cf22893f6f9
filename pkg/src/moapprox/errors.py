"""Exception hierarchy shared by the library and the command line."""


class DomainError(ValueError):
    """Input violates an operation's precondition."""


class CapRefusal(DomainError):
    """Instance is larger than a configured enumeration cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds enumeration cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class ParseError(DomainError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InternalError(RuntimeError):
    """An invariant that the algorithm guarantees was found broken."""
