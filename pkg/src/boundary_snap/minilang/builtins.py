"""Builtin functions available to every MiniLang module."""

from __future__ import annotations

from .errors import RUNTIME_ERROR_TYPES, AssertionFailed
from .values import ExcValue, MList, MMap, display, equals, show, throw, typeof


def _want(value, kind, fn: str, what: str):
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        throw("TypeError", f"{fn}: expected {what}, got {typeof(value)}")
    return value


def _index(xs: MList, i, fn: str) -> int:
    _want(i, int, fn, "int index")
    if not 0 <= i < len(xs.items):
        throw("IndexError", f"{fn}: index {i} out of range for length {len(xs.items)}")
    return i


def b_len(interp, v):
    if isinstance(v, str):
        return len(v)
    if isinstance(v, MList):
        return len(v.items)
    if isinstance(v, MMap):
        return len(v.entries)
    throw("TypeError", f"len: expected str, list or map, got {typeof(v)}")


def b_push(interp, xs, v):
    _want(xs, MList, "push", "list")
    if xs.fixed:
        throw("FixedSizeError", "push on fixed-size list")
    xs.items.append(v)
    return None


def b_pop(interp, xs):
    _want(xs, MList, "pop", "list")
    if xs.fixed:
        throw("FixedSizeError", "pop on fixed-size list")
    if not xs.items:
        throw("IndexError", "pop from empty list")
    return xs.items.pop()


def b_get(interp, c, k):
    if isinstance(c, MList):
        return c.items[_index(c, k, "get")]
    if isinstance(c, MMap):
        _want(k, str, "get", "str key")
        if k not in c.entries:
            throw("KeyError", f"get: no key {show(k)}")
        return c.entries[k]
    throw("TypeError", f"get: expected list or map, got {typeof(c)}")


def b_set(interp, c, k, v):
    # fixed lists allow element replacement, only their length is frozen
    if isinstance(c, MList):
        c.items[_index(c, k, "set")] = v
        return None
    if isinstance(c, MMap):
        _want(k, str, "set", "str key")
        c.entries[k] = v
        return None
    throw("TypeError", f"set: expected list or map, got {typeof(c)}")


def b_keys(interp, m):
    _want(m, MMap, "keys", "map")
    return MList(sorted(m.entries))


def b_split(interp, s, delim):
    _want(s, str, "split", "str")
    _want(delim, str, "split", "str delimiter")
    if delim == "":
        throw("TypeError", "split: empty delimiter")
    return MList(s.split(delim))


def b_join(interp, xs, sep):
    _want(xs, MList, "join", "list")
    _want(sep, str, "join", "str separator")
    for x in xs.items:
        _want(x, str, "join", "list of str")
    return sep.join(xs.items)


def b_str(interp, v):
    return display(v)


def b_typeof(interp, v):
    return typeof(v)


def b_freeze(interp, xs):
    _want(xs, MList, "freeze", "list")
    return MList(xs.items, fixed=True)


def b_print(interp, v):
    interp.stdout.append(display(v) + "\n")
    return None


def b_starts_with(interp, s, prefix):
    _want(s, str, "starts_with", "str")
    _want(prefix, str, "starts_with", "str prefix")
    return s.startswith(prefix)


def b_error(interp, type_name, message):
    _want(type_name, str, "error", "str type name")
    _want(message, str, "error", "str message")
    return ExcValue(type_name, message)


def _exc_constructor(type_name):
    def make(interp, message):
        _want(message, str, type_name, "str message")
        return ExcValue(type_name, message)

    return make


def b_assert(interp, cond):
    if cond is not True:
        raise AssertionFailed(f"assert: condition is {display(cond)}")
    return None


def b_assert_eq(interp, a, b):
    if not equals(a, b):
        raise AssertionFailed(f"assert_eq: {show(a)} != {show(b)}")
    return None


BUILTINS = {
    "len": b_len,
    "push": b_push,
    "pop": b_pop,
    "get": b_get,
    "set": b_set,
    "keys": b_keys,
    "split": b_split,
    "join": b_join,
    "str": b_str,
    "typeof": b_typeof,
    "freeze": b_freeze,
    "print": b_print,
    "starts_with": b_starts_with,
    "error": b_error,
    "Error": _exc_constructor("Error"),
}
BUILTINS.update({name: _exc_constructor(name) for name in RUNTIME_ERROR_TYPES})

TEST_ONLY_BUILTINS = {"assert": b_assert, "assert_eq": b_assert_eq}
