"""Runtime value model.

Scalars map onto Python ``None``, ``bool``, ``int``, ``float`` and ``str``.
Lists, maps and instances are mutable reference objects; exceptions are
immutable values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import Thrown


class MList:
    __slots__ = ("items", "fixed")

    def __init__(self, items=None, fixed: bool = False):
        self.items = list(items or [])
        self.fixed = fixed

    def __repr__(self) -> str:
        return f"MList({self.items!r}, fixed={self.fixed})"


class MMap:
    __slots__ = ("entries",)

    def __init__(self, entries=None):
        self.entries: dict[str, object] = dict(entries or {})

    def __repr__(self) -> str:
        return f"MMap({self.entries!r})"


@dataclass(eq=False)
class Instance:
    class_id: str  # "module::Class"
    origin: str  # module kind of the declaring module
    record: bool
    fields: dict = field(default_factory=dict)

    @property
    def class_name(self) -> str:
        return self.class_id.split("::", 1)[1]


@dataclass(frozen=True)
class ExcValue:
    type: str
    message: str


def throw(type_name: str, message: str):
    raise Thrown(ExcValue(type_name, message))


def typeof(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "float"
    if isinstance(v, str):
        return "str"
    if isinstance(v, MList):
        return "list"
    if isinstance(v, MMap):
        return "map"
    if isinstance(v, Instance):
        return v.class_name
    if isinstance(v, ExcValue):
        return "exception"
    raise TypeError(f"not a MiniLang value: {v!r}")


def _guard(v, active: set):
    key = id(v)
    if key in active:
        throw("TypeError", "cyclic value")
    active.add(key)
    return key


def show(v, active: set | None = None) -> str:
    """Render a value the way it appears nested inside containers."""
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    return display(v, active)


def display(v, active: set | None = None) -> str:
    """The result of the ``str`` builtin."""
    if active is None:
        active = set()
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, ExcValue):
        return f"{v.type}: {v.message}"
    key = _guard(v, active)
    try:
        if isinstance(v, MList):
            return "[" + ", ".join(show(x, active) for x in v.items) + "]"
        if isinstance(v, MMap):
            return "{" + ", ".join(f"{show(k)}: {show(v.entries[k], active)}" for k in sorted(v.entries)) + "}"
        if isinstance(v, Instance):
            if v.record:
                inner = ", ".join(f"{k}={show(v.fields[k], active)}" for k in sorted(v.fields))
                return f"{v.class_name}({inner})"
            return f"<{v.class_id}>"
    finally:
        active.discard(key)
    raise TypeError(f"not a MiniLang value: {v!r}")


def equals(a, b, active: set | None = None) -> bool:
    """Deep equality; identity for non-record instances. Fixedness is ignored."""
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if a is None or b is None:
        return a is b
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    if isinstance(a, float) and isinstance(b, float):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, ExcValue) and isinstance(b, ExcValue):
        return a == b
    if a is b:
        return True
    if active is None:
        active = set()
    if isinstance(a, MList) and isinstance(b, MList):
        if len(a.items) != len(b.items):
            return False
        key = _guard(a, active)
        try:
            return all(equals(x, y, active) for x, y in zip(a.items, b.items))
        finally:
            active.discard(key)
    if isinstance(a, MMap) and isinstance(b, MMap):
        if a.entries.keys() != b.entries.keys():
            return False
        key = _guard(a, active)
        try:
            return all(equals(a.entries[k], b.entries[k], active) for k in a.entries)
        finally:
            active.discard(key)
    if isinstance(a, Instance) and isinstance(b, Instance):
        if not (a.record and b.record and a.class_id == b.class_id):
            return False
        if a.fields.keys() != b.fields.keys():
            return False
        key = _guard(a, active)
        try:
            return all(equals(a.fields[k], b.fields[k], active) for k in a.fields)
        finally:
            active.discard(key)
    return False


def contains_plain_instance(v, active: set | None = None) -> bool:
    """True when a non-record instance is reachable from ``v``."""
    if active is None:
        active = set()
    if isinstance(v, Instance) and not v.record:
        return True
    if isinstance(v, (MList, MMap, Instance)):
        if id(v) in active:
            return False
        active.add(id(v))
        children = (
            v.items if isinstance(v, MList) else v.entries.values() if isinstance(v, MMap) else v.fields.values()
        )
        return any(contains_plain_instance(c, active) for c in children)
    return False
