"""Exception hierarchy shared by the library and the CLI."""


class FdsRankError(Exception):
    """Base class for all errors raised by fdsrank."""


class InputError(FdsRankError, ValueError):
    """Malformed input: bad vertex labels, table sizes, file syntax, ..."""


class ResourceLimitError(FdsRankError, RuntimeError):
    """A configured size guard (state space, enumeration budget) was exceeded."""


class ConstructionError(FdsRankError):
    """A builder could not produce a system with the required guarantees."""
