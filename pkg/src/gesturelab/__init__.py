"""Toolkit for conversational gesture data: motion, audio, transcripts,
annotations, beat analysis, evaluation metrics and a multi-modal
gesture generator."""

from .errors import DataMismatchError, GestureLabError, NumericError, ParseError

__version__ = "0.1.0"

__all__ = [
    "DataMismatchError",
    "GestureLabError",
    "NumericError",
    "ParseError",
    "__version__",
]
