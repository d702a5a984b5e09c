"""Brute-force first-divergence oracle, independent of the differ's bijection.

Each side is renumbered on its own by order of first appearance; two prefixes
agree iff their renumbered token streams are equal.
"""

from __future__ import annotations

import json

from boundary_snap.model import SExc, SList, SMap, SRec, SRef
from boundary_snap.snapstore import canonical_encode


class _Canon:
    def __init__(self):
        self.ids: dict[str, int] = {}

    def ident(self, oid: str) -> str:
        return f"#{self.ids.setdefault(oid, len(self.ids) + 1)}"

    def value(self, v) -> str:
        t = type(v)
        if t is SRef:
            return f"ref({self.ident(v.id)},{v.cls})"
        if t is SList:
            return f"list({v.fixed};" + ",".join(self.value(x) for x in v.items) + ")"
        if t is SMap:
            return "map(" + ",".join(json.dumps(k) + ":" + self.value(x) for k, x in v.entries) + ")"
        if t is SRec:
            return f"rec({v.cls};" + ",".join(json.dumps(k) + ":" + self.value(x) for k, x in v.fields) + ")"
        return canonical_encode(v)


def _args(args) -> str:
    return "[" + ",".join(canonical_encode(a) for a in args) + "]"


def first_divergence(old, new):
    """``(position, category, old, new)`` or None."""
    ca, cb = _Canon(), _Canon()
    for a, b in zip(old.interactions, new.interactions):
        if a.method != b.method:
            return a.seq, "PROTOCOL_CHANGE", json.dumps(a.method), json.dumps(b.method)
        ra = "-" if a.recv is None else ca.ident(a.recv)
        rb = "-" if b.recv is None else cb.ident(b.recv)
        if ra != rb:
            return a.seq, "PROTOCOL_CHANGE", json.dumps(a.recv), json.dumps(b.recv)
        if [ca.value(x) for x in a.args] != [cb.value(x) for x in b.args]:
            return a.seq, "INPUT_CHANGE", _args(a.args), _args(b.args)
        if ca.value(a.result) != cb.value(b.result):
            exc = isinstance(a.result, SExc) or isinstance(b.result, SExc)
            cat = "EXCEPTION_CHANGE" if exc else "VALUE_CHANGE"
            return a.seq, cat, canonical_encode(a.result), canonical_encode(b.result)
    n_old, n_new = len(old.interactions), len(new.interactions)
    if n_old != n_new:
        return min(n_old, n_new) + 1, "LENGTH_CHANGE", str(n_old), str(n_new)
    if old.status != new.status:
        return n_old + 1, "OUTCOME_CHANGE", json.dumps(old.status), json.dumps(new.status)
    return None
