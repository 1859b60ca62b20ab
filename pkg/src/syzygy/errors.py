"""Exception types shared across the package."""


class SyzygyError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SyzygyError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceLimitError(SyzygyError):
    """A size cap guarding factorial blowup was exceeded."""

    def __init__(self, what, value, cap):
        self.what = what
        self.value = value
        self.cap = cap
        super().__init__(f"{what}={value} exceeds the configured cap of {cap}")


class UndefinedSymbolError(DomainError):
    """The Levi-Civita symbol was requested with fewer distinct indices than the dimension."""


class InconsistencyError(SyzygyError):
    """An internal consistency check failed; signals a bug in an expansion."""
