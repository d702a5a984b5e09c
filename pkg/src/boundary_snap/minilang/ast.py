"""MiniLang syntax tree.

Nodes are frozen dataclasses holding tuples, so a tree can be shared between
a project and its mutants. Source positions do not take part in equality;
two trees are structurally equal when they differ only in layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Pos = tuple  # (line, col)


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


# -- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: object  # None, bool, int, float or str
    pos: Pos = _pos()


@dataclass(frozen=True)
class ListLit:
    items: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class MapLit:
    entries: tuple  # of (key expr, value expr)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class SelfRef:
    pos: Pos = _pos()


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class MethodCall:
    target: "Expr"
    method: str
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class Field:
    target: "Expr"
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


Expr = Union[Literal, ListLit, MapLit, Name, SelfRef, Call, MethodCall, Field, Unary, Binary]


# -- statements ------------------------------------------------------------


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    target: Expr  # Name or Field
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple | None  # statements, or None when there is no else branch
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class ForIn:
    var: str
    iterable: Expr
    body: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class Return:
    value: Expr | None
    pos: Pos = _pos()


@dataclass(frozen=True)
class Throw:
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Try:
    body: tuple
    var: str
    handler: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    pos: Pos = _pos()


Stmt = Union[Let, Assign, If, While, ForIn, Return, Throw, Try, ExprStmt]


# -- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class FnDecl:
    name: str
    params: tuple
    body: tuple
    exported: bool = False
    pos: Pos = _pos()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    methods: tuple  # of FnDecl, exported=False
    record: bool = False
    exported: bool = False
    pos: Pos = _pos()

    def method(self, name: str) -> FnDecl | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class TestDecl:
    name: str
    body: tuple
    pos: Pos = _pos()


Decl = Union[FnDecl, ClassDecl, TestDecl]


@dataclass(frozen=True)
class Module:
    name: str
    kind: str  # library, client or test
    declarations: tuple
    path: str = field(default="", compare=False)

    @property
    def exports(self) -> frozenset[str]:
        return frozenset(
            d.name for d in self.declarations if isinstance(d, (FnDecl, ClassDecl)) and d.exported
        )

    def declaration(self, name: str) -> FnDecl | ClassDecl | None:
        for d in self.declarations:
            if isinstance(d, (FnDecl, ClassDecl)) and d.name == name:
                return d
        return None

    @property
    def tests(self) -> tuple[TestDecl, ...]:
        return tuple(d for d in self.declarations if isinstance(d, TestDecl))


def walk(node):
    """Yield ``node`` and every node below it, depth first, in source order."""
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, tuple):
            stack.extend(reversed(cur))
            continue
        if cur is None or not hasattr(cur, "__dataclass_fields__"):
            continue
        yield cur
        children = []
        for name in cur.__dataclass_fields__:
            if name == "pos":
                continue
            value = getattr(cur, name)
            if isinstance(value, tuple) or hasattr(value, "__dataclass_fields__"):
                children.append(value)
        stack.extend(reversed(children))
