"""Recursive-descent parser producing :mod:`boundary_snap.minilang.ast` trees."""

from __future__ import annotations

import re

from . import ast
from .errors import ParseError
from .lexer import Token, tokenize

MODULE_KINDS = ("library", "client", "test")

TEST_NAME = re.compile(r"[A-Za-z0-9_.-]+")

# binary operator precedence, lowest first
_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    if tok.kind in ("op", "kw"):
        return repr(tok.value)
    if tok.kind == "semi":
        return "';'"
    return f"{tok.kind} {tok.value!r}"


class Parser:
    def __init__(self, source: str, kind: str, path: str | None = None):
        if kind not in MODULE_KINDS:
            raise ValueError(f"unknown module kind {kind!r}")
        self.kind = kind
        self.path = path
        self.tokens = tokenize(source)
        last = self.tokens[-1] if self.tokens else None
        eof_pos = (last.line, last.col + len(str(last.value))) if last else (1, 1)
        self.tokens.append(Token("eof", None, *eof_pos))
        self.i = 0

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _is(self, kind: str, value=None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def _accept(self, kind: str, value=None) -> Token | None:
        if self._is(kind, value):
            t = self.tok
            self.i += 1
            return t
        return None

    def _error(self, expected: set[str], message: str | None = None) -> ParseError:
        t = self.tok
        msg = message or f"unexpected {_describe(t)}"
        return ParseError(msg, t.line, t.col, frozenset(expected), self.path)

    def _expect(self, kind: str, value=None) -> Token:
        t = self._accept(kind, value)
        if t is None:
            label = repr(value) if value is not None else kind
            if kind == "semi":
                label = "';'"
            raise self._error({label})
        return t

    def _ident(self) -> Token:
        return self._expect("ident")

    # -- declarations ---------------------------------------------------

    def parse_module(self, name: str) -> ast.Module:
        decls = []
        while not self._is("eof"):
            decls.append(self._declaration())
        return ast.Module(name=name, kind=self.kind, declarations=tuple(decls), path=self.path or "")

    def _declaration(self):
        start = self.tok
        exported = False
        if self._is("kw", "export"):
            if self.kind != "library":
                raise self._error(set(), "'export' is only allowed in library modules")
            self.i += 1
            exported = True
        if self._is("kw", "fn"):
            return self._function(exported, (start.line, start.col))
        if self._is("kw", "class") or self._is("kw", "record"):
            return self._class(exported, (start.line, start.col))
        if self._is("kw", "test") and not exported:
            if self.kind != "test":
                raise self._error(set(), "'test' blocks are only allowed in test modules")
            self.i += 1
            name_tok = self._expect("str")
            if not TEST_NAME.fullmatch(name_tok.value):
                raise ParseError(
                    f"test name {name_tok.value!r} must match [A-Za-z0-9_.-]+",
                    name_tok.line, name_tok.col, frozenset(), self.path,
                )
            body = self._block()
            return ast.TestDecl(name_tok.value, body, pos=(start.line, start.col))
        expected = {"'fn'", "'class'", "'record'"}
        if not exported and self.kind == "library":
            expected.add("'export'")
        if not exported and self.kind == "test":
            expected.add("'test'")
        raise self._error(expected)

    def _params(self) -> tuple:
        self._expect("op", "(")
        params = []
        if not self._is("op", ")"):
            if not self._is("ident"):
                raise self._error({"ident", "')'"})
            while True:
                params.append(self._ident().value)
                if not self._accept("op", ","):
                    break
        self._expect("op", ")")
        if len(set(params)) != len(params):
            raise self._error(set(), "duplicate parameter name")
        return tuple(params)

    def _function(self, exported: bool, pos) -> ast.FnDecl:
        self._expect("kw", "fn")
        name = self._ident().value
        params = self._params()
        body = self._block()
        return ast.FnDecl(name, params, body, exported, pos=pos)

    def _class(self, exported: bool, pos) -> ast.ClassDecl:
        record = bool(self._accept("kw", "record"))
        self._expect("kw", "class")
        name = self._ident().value
        self._expect("op", "{")
        methods = []
        seen = set()
        while not self._accept("op", "}"):
            if self._is("eof"):
                raise self._error({"'}'", "ident"})
            t = self._ident()
            if t.value in seen:
                raise ParseError(f"duplicate method {t.value!r}", t.line, t.col, frozenset(), self.path)
            seen.add(t.value)
            params = self._params()
            body = self._block()
            methods.append(ast.FnDecl(t.value, params, body, False, pos=(t.line, t.col)))
        return ast.ClassDecl(name, tuple(methods), record, exported, pos=pos)

    # -- statements -----------------------------------------------------

    def _block(self) -> tuple:
        self._expect("op", "{")
        stmts = []
        while not self._accept("op", "}"):
            if self._is("eof"):
                raise self._error({"'}'"})
            stmts.append(self._statement())
        return tuple(stmts)

    def _statement(self):
        t = self.tok
        pos = (t.line, t.col)
        if self._accept("kw", "let"):
            name = self._ident().value
            self._expect("op", "=")
            value = self._expression()
            self._expect("semi")
            return ast.Let(name, value, pos=pos)
        if self._is("kw", "if"):
            return self._if()
        if self._accept("kw", "while"):
            cond = self._expression()
            return ast.While(cond, self._block(), pos=pos)
        if self._accept("kw", "for"):
            var = self._ident().value
            self._expect("kw", "in")
            iterable = self._expression()
            return ast.ForIn(var, iterable, self._block(), pos=pos)
        if self._accept("kw", "return"):
            value = None
            if not self._is("semi"):
                value = self._expression()
            self._expect("semi")
            return ast.Return(value, pos=pos)
        if self._accept("kw", "throw"):
            value = self._expression()
            self._expect("semi")
            return ast.Throw(value, pos=pos)
        if self._accept("kw", "try"):
            body = self._block()
            self._expect("kw", "catch")
            var = self._ident().value
            handler = self._block()
            return ast.Try(body, var, handler, pos=pos)
        expr = self._expression()
        if self._accept("op", "="):
            if not isinstance(expr, (ast.Name, ast.Field)):
                raise ParseError("invalid assignment target", t.line, t.col, frozenset(), self.path)
            value = self._expression()
            self._expect("semi")
            return ast.Assign(expr, value, pos=pos)
        self._expect("semi")
        return ast.ExprStmt(expr, pos=pos)

    def _if(self) -> ast.If:
        t = self._expect("kw", "if")
        cond = self._expression()
        then = self._block()
        orelse = None
        if self._accept("kw", "else"):
            if self._is("kw", "if"):
                orelse = (self._if(),)
            else:
                orelse = self._block()
        return ast.If(cond, then, orelse, pos=(t.line, t.col))

    # -- expressions ----------------------------------------------------

    def _expression(self):
        return self._binary(0)

    def _binary(self, level: int):
        if level == len(_LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        ops = _LEVELS[level]
        while self.tok.kind == "op" and self.tok.value in ops:
            t = self.tok
            self.i += 1
            right = self._binary(level + 1)
            left = ast.Binary(t.value, left, right, pos=(t.line, t.col))
        return left

    def _unary(self):
        t = self.tok
        if t.kind == "op" and t.value in ("!", "-"):
            self.i += 1
            return ast.Unary(t.value, self._unary(), pos=(t.line, t.col))
        return self._postfix()

    def _args(self) -> tuple:
        self._expect("op", "(")
        args = []
        if not self._is("op", ")"):
            while True:
                args.append(self._expression())
                if not self._accept("op", ","):
                    break
        self._expect("op", ")")
        return tuple(args)

    def _postfix(self):
        expr = self._primary()
        while self._is("op", "."):
            dot = self.tok
            self.i += 1
            name = self._ident().value
            if self._is("op", "("):
                expr = ast.MethodCall(expr, name, self._args(), pos=(dot.line, dot.col))
            else:
                expr = ast.Field(expr, name, pos=(dot.line, dot.col))
        return expr

    def _primary(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind in ("int", "float", "str"):
            self.i += 1
            return ast.Literal(t.value, pos=pos)
        if t.kind == "kw":
            if t.value in ("true", "false"):
                self.i += 1
                return ast.Literal(t.value == "true", pos=pos)
            if t.value == "null":
                self.i += 1
                return ast.Literal(None, pos=pos)
            if t.value == "self":
                self.i += 1
                return ast.SelfRef(pos=pos)
        if t.kind == "ident":
            self.i += 1
            if self._is("op", "("):
                return ast.Call(t.value, self._args(), pos=pos)
            return ast.Name(t.value, pos=pos)
        if self._accept("op", "("):
            expr = self._expression()
            self._expect("op", ")")
            return expr
        if self._accept("op", "["):
            items = []
            if not self._is("op", "]"):
                while True:
                    items.append(self._expression())
                    if not self._accept("op", ","):
                        break
            self._expect("op", "]")
            return ast.ListLit(tuple(items), pos=pos)
        if self._accept("op", "{"):
            entries = []
            if not self._is("op", "}"):
                while True:
                    key = self._expression()
                    self._expect("op", ":")
                    entries.append((key, self._expression()))
                    if not self._accept("op", ","):
                        break
            self._expect("op", "}")
            return ast.MapLit(tuple(entries), pos=pos)
        raise self._error(
            {"literal", "ident", "'('", "'['", "'{'", "'-'", "'!'", "'self'"},
            f"expected expression, found {_describe(t)}",
        )


def parse(source: str, name: str, kind: str, path: str | None = None) -> ast.Module:
    return Parser(source, kind, path).parse_module(name)


def parse_expression(source: str) -> ast.Expr:
    """Parse a standalone expression, e.g. a mutation default literal."""
    p = Parser(source, "library")
    expr = p._expression()
    if not p._is("eof"):
        raise p._error({"end of input"})
    return expr
