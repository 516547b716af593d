"""Exception hierarchy shared by every engine module."""

from __future__ import annotations


class WMIError(Exception):
    """Base class for all errors raised by lwmi."""


class InputError(WMIError):
    """Malformed or semantically invalid input (CLI exit code 1)."""


class ParseError(InputError):
    """Syntax error in a problem or expression document.

    ``position`` is a JSON path such as ``$.formula.args[1].lhs`` or, for
    raw JSON decoding failures, a character offset.
    """

    def __init__(self, message: str, position: str | int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class UndeclaredVariableError(ParseError):
    pass


class NegativeWeightError(InputError):
    """A weight evaluated to a negative number."""


class NotAPdfError(InputError):
    pass


class CapacityError(WMIError):
    """A configured size cap was exceeded (CLI exit code 2)."""


class BackendUnavailableError(WMIError):
    """The requested backend cannot handle this input (CLI exit code 2)."""
