class IsopolyError(Exception):
    """Base class for every error raised by the package."""

    kind = 'error'


class InputError(IsopolyError, ValueError):
    """Malformed user data: files, flags, permutations, graphs."""

    kind = 'input_error'


class GraphParseError(InputError):
    """A graph file could not be decoded. Carries the 1-based line or the 0-based byte offset."""

    def __init__(self, message, line=None, offset=None):
        if line is not None:
            message = f"{message}, line {line}"
        elif offset is not None:
            message = f"{message} at byte offset {offset}"
        super().__init__(message)
        self.line = line
        self.offset = offset


class TensorFormatError(InputError):
    """An objective tensor JSON document is malformed."""


class DimensionMismatchError(IsopolyError, ValueError):
    kind = 'dimension_mismatch'


class CapExceededError(IsopolyError, RuntimeError):
    """An enumeration was asked for an n beyond its configured cap."""

    kind = 'cap_exceeded'

    def __init__(self, name, n, cap):
        super().__init__(f"{name}: n={n} exceeds the cap of {cap} (raise it with ISOPOLY_MAX_N)")
        self.name = name
        self.n = n
        self.cap = cap


def check_cap(name, n, cap):
    if n > cap:
        raise CapExceededError(name, n, cap)
