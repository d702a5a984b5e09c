"""Tokenizer for MiniLang source text."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

KEYWORDS = frozenset(
    {
        "let", "fn", "class", "record", "export", "if", "else", "while", "for",
        "in", "return", "throw", "try", "catch", "test", "true", "false", "null",
        "self",
    }
)

# longest first so that `==` wins over `=`
OPERATORS = (
    "==", "!=", "<=", ">=", "&&", "||",
    "+", "-", "*", "/", "%", "<", ">", "!", "=",
    "(", ")", "{", "}", "[", "]", ",", ".", ":",
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "0": "\0", '"': '"', "\\": "\\"}

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


@dataclass(frozen=True)
class Token:
    kind: str  # kw, ident, op, int, float, str, semi, eof
    value: object
    line: int
    col: int

    def __str__(self) -> str:
        if self.kind == "semi":
            return "semi"
        if self.kind == "str":
            return f'str:"{self.value}"'
        return f"{self.kind}:{self.value}"


def _is_ident_start(c: str) -> bool:
    return c == "_" or ("a" <= c <= "z") or ("A" <= c <= "Z")


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or c.isdigit() and c.isascii()


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens. Comments and whitespace are dropped."""
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1
    n = len(source)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance()
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            advance(j - i)
            continue
        if c.isascii() and c.isdigit():
            j = i
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            is_float = False
            if j + 1 < n and source[j] == "." and source[j + 1].isascii() and source[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and source[j].isascii() and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isascii() and source[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and source[j].isascii() and source[j].isdigit():
                        j += 1
            text = source[i:j]
            if is_float:
                value: object = float(text)
                if value in (float("inf"), float("-inf")):
                    raise LexError(f"float literal out of range: {text}", start_line, start_col)
                tokens.append(Token("float", value, start_line, start_col))
            else:
                value = int(text)
                if value > INT_MAX:
                    raise LexError(f"integer literal out of range: {text}", start_line, start_col)
                tokens.append(Token("int", value, start_line, start_col))
            advance(j - i)
            continue
        if c == '"':
            advance()
            chars: list[str] = []
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError("unterminated string literal", start_line, start_col)
                ch = source[i]
                if ch == '"':
                    advance()
                    break
                if ch == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string literal", start_line, start_col)
                    esc = source[i + 1]
                    if esc in _ESCAPES:
                        chars.append(_ESCAPES[esc])
                        advance(2)
                    elif esc == "u":
                        digits = source[i + 2 : i + 6]
                        if len(digits) != 4 or any(d not in "0123456789abcdefABCDEF" for d in digits):
                            raise LexError("bad \\u escape", line, col)
                        cp = int(digits, 16)
                        if 0xD800 <= cp <= 0xDFFF:
                            raise LexError("surrogate code point in \\u escape", line, col)
                        chars.append(chr(cp))
                        advance(6)
                    else:
                        raise LexError(f"unknown escape \\{esc}", line, col)
                    continue
                chars.append(ch)
                advance()
            tokens.append(Token("str", "".join(chars), start_line, start_col))
            continue
        if c == ";":
            tokens.append(Token("semi", ";", start_line, start_col))
            advance()
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, start_line, start_col))
                advance(len(op))
                break
        else:
            raise LexError(f"unexpected character {c!r}", start_line, start_col)
    return tokens
