"""Shared exception types.

The CLI maps these onto process exit codes, so library code should raise
the most specific one that applies: ParseError for malformed input files,
DataMismatchError for structurally valid inputs that do not fit together
(length or shape disagreements, empty sets), and NumericError for
numerical failures (non-finite losses, materially non-symmetric matrices).
"""

from __future__ import annotations


class GestureLabError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GestureLabError):
    """A file or document could not be parsed.

    Carries an optional line number so messages can point at the offending
    spot in the input.
    """

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class DataMismatchError(GestureLabError):
    """Inputs are individually valid but inconsistent with each other."""


class NumericError(GestureLabError):
    """A numerical computation failed or produced non-finite values."""
