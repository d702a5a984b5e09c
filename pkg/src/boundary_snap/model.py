"""Serialized values, interactions and snapshots.

Everything here is immutable and free of runtime handles, so it can be
compared, hashed and shipped between processes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Union

SNAPSHOT_VERSION = 1
STATUSES = ("passed", "failed", "errored")


@dataclass(frozen=True)
class SNull:
    pass


@dataclass(frozen=True)
class SBool:
    v: bool


@dataclass(frozen=True)
class SInt:
    v: int


@dataclass(frozen=True, eq=False)
class SFloat:
    v: float

    # bit-pattern equality keeps 0.0 and -0.0 apart
    def _bits(self) -> bytes:
        return struct.pack("<d", self.v)

    def __eq__(self, other) -> bool:
        return isinstance(other, SFloat) and self._bits() == other._bits()

    def __hash__(self) -> int:
        return hash(("float", self._bits()))


@dataclass(frozen=True)
class SStr:
    v: str


@dataclass(frozen=True)
class SList:
    items: tuple
    fixed: bool = False


@dataclass(frozen=True)
class SMap:
    entries: tuple  # of (key, value), sorted by UTF-8 key bytes


@dataclass(frozen=True)
class SRec:
    cls: str
    fields: tuple  # of (name, value), sorted by UTF-8 name bytes


@dataclass(frozen=True)
class SRef:
    id: str
    cls: str


@dataclass(frozen=True)
class SExc:
    type: str
    msg: str


SerializedValue = Union[SNull, SBool, SInt, SFloat, SStr, SList, SMap, SRec, SRef, SExc]


def key_bytes(k: str) -> bytes:
    return k.encode("utf-8")


def smap(entries) -> SMap:
    return SMap(tuple(sorted(entries, key=lambda kv: key_bytes(kv[0]))))


def srec(cls: str, fields) -> SRec:
    return SRec(cls, tuple(sorted(fields, key=lambda kv: key_bytes(kv[0]))))


@dataclass(frozen=True)
class Interaction:
    seq: int
    method: str
    recv: str | None
    args: tuple
    result: SerializedValue


@dataclass(frozen=True)
class Snapshot:
    test: str
    project: str
    library: str
    interactions: tuple
    status: str
    detail: str | None = None
    version: int = SNAPSHOT_VERSION

    @property
    def methods(self) -> set[str]:
        return {i.method for i in self.interactions}
