"""Errors raised while loading or running MiniLang code.

Static errors (lexing, parsing, linking, manifests) are ordinary Python
exceptions. Runtime errors inside a test are MiniLang exceptions carried by
:class:`Thrown`, so ``try``/``catch`` in MiniLang code can intercept them.
Errors derived from :class:`Abort` cannot be caught by MiniLang code.
"""

from __future__ import annotations

# names of the runtime error types MiniLang code may throw and catch
RUNTIME_ERROR_TYPES = (
    "TypeError",
    "NameError",
    "IndexError",
    "KeyError",
    "ArithmeticError",
    "FixedSizeError",
    "ArityError",
)


class MiniLangError(Exception):
    """Base class for static MiniLang errors."""


class SourceError(MiniLangError):
    def __init__(self, message: str, line: int, col: int, path: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"{self.path}:" if self.path else ""
        return f"{where}{self.line}:{self.col}: {self.message}"


class LexError(SourceError):
    pass


class ParseError(SourceError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset(), path: str | None = None):
        self.expected = frozenset(expected)
        super().__init__(message, line, col, path)

    def __str__(self) -> str:
        text = super().__str__()
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        return text


class ManifestError(MiniLangError):
    pass


class LinkError(MiniLangError):
    pass


class Thrown(Exception):
    """A MiniLang exception propagating through the interpreter."""

    def __init__(self, value):
        self.value = value
        super().__init__(f"{value.type}: {value.message}")


class Abort(Exception):
    """Uncatchable condition that terminates the running test."""

    kind = "Abort"

    def __str__(self) -> str:
        return f"{self.kind}: {self.args[0] if self.args else ''}"


class AssertionFailed(Abort):
    kind = "AssertionFailed"

    def __str__(self) -> str:
        return self.args[0]


class ExecutionLimit(Abort):
    kind = "ExecutionLimit"


class ProbeFailure(Abort):
    kind = "ProbeFailure"
