"""Canonical line-oriented snapshot files.

Every value has exactly one textual form; readers re-encode what they parse
and reject anything that does not reproduce the input bytes, so a file that
reads successfully also writes back identically.
"""

from __future__ import annotations

import json
import math
import os
import re
import tempfile
from pathlib import Path

from .errors import FormatError, TruncatedSnapshot
from .model import (
    SNAPSHOT_VERSION,
    STATUSES,
    Interaction,
    SBool,
    SExc,
    SFloat,
    SInt,
    SList,
    SMap,
    SNull,
    SRec,
    SRef,
    SStr,
    Snapshot,
    key_bytes,
)

SUFFIX = ".snap.jsonl"
FLAKY_FILE = "flaky.json"
_OBJECT_ID = re.compile(r"o[1-9][0-9]*")
_INT_MIN, _INT_MAX = -(2**63), 2**63 - 1


def _s(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


# -- values --------------------------------------------------------------------


def canonical_encode(v) -> str:
    t = type(v)
    if t is SStr:
        return '{"t":"str","v":' + _s(v.v) + "}"
    if t is SInt:
        return '{"t":"int","v":' + str(v.v) + "}"
    if t is SNull:
        return '{"t":"null"}'
    if t is SBool:
        return '{"t":"bool","v":' + ("true" if v.v else "false") + "}"
    if t is SFloat:
        return '{"t":"float","v":' + repr(v.v) + "}"
    if t is SList:
        items = ",".join(canonical_encode(x) for x in v.items)
        return '{"t":"list","fixed":' + ("true" if v.fixed else "false") + ',"items":[' + items + "]}"
    if t is SMap:
        entries = ",".join("[" + _s(k) + "," + canonical_encode(x) + "]" for k, x in v.entries)
        return '{"t":"map","entries":[' + entries + "]}"
    if t is SRec:
        fields = ",".join("[" + _s(k) + "," + canonical_encode(x) + "]" for k, x in v.fields)
        return '{"t":"rec","class":' + _s(v.cls) + ',"fields":[' + fields + "]}"
    if t is SRef:
        return '{"t":"ref","id":' + _s(v.id) + ',"class":' + _s(v.cls) + "}"
    if t is SExc:
        return '{"t":"exc","type":' + _s(v.type) + ',"msg":' + _s(v.msg) + "}"
    raise TypeError(f"not a serialized value: {v!r}")


def _keys(obj: dict, *keys: str) -> None:
    if list(obj) != list(keys):
        raise FormatError(f"expected keys {list(keys)}, got {list(obj)}")


def _str(x) -> str:
    if not isinstance(x, str):
        raise FormatError(f"expected string, got {x!r}")
    return x


def _entries(raw, label: str) -> tuple:
    if not isinstance(raw, list):
        raise FormatError(f"{label} must be a list")
    out = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FormatError(f"{label} entry must be a [key, value] pair")
        out.append((_str(pair[0]), decode_value(pair[1])))
    keys = [key_bytes(k) for k, _ in out]
    if any(a >= b for a, b in zip(keys, keys[1:])):
        raise FormatError(f"{label} keys must be strictly increasing")
    return tuple(out)


def decode_value(obj):
    """Build a serialized value from parsed JSON, validating its shape."""
    if not isinstance(obj, dict) or "t" not in obj:
        raise FormatError(f"not a tagged value: {obj!r}")
    tag = obj["t"]
    if tag == "null":
        _keys(obj, "t")
        return SNull()
    if tag == "bool":
        _keys(obj, "t", "v")
        if not isinstance(obj["v"], bool):
            raise FormatError("bool value must be true or false")
        return SBool(obj["v"])
    if tag == "int":
        _keys(obj, "t", "v")
        v = obj["v"]
        if not isinstance(v, int) or isinstance(v, bool) or not _INT_MIN <= v <= _INT_MAX:
            raise FormatError(f"bad int value {v!r}")
        return SInt(v)
    if tag == "float":
        _keys(obj, "t", "v")
        v = obj["v"]
        if not isinstance(v, float) or not math.isfinite(v):
            raise FormatError(f"bad float value {v!r}")
        return SFloat(v)
    if tag == "str":
        _keys(obj, "t", "v")
        return SStr(_str(obj["v"]))
    if tag == "list":
        _keys(obj, "t", "fixed", "items")
        if not isinstance(obj["fixed"], bool) or not isinstance(obj["items"], list):
            raise FormatError("bad list value")
        return SList(tuple(decode_value(x) for x in obj["items"]), obj["fixed"])
    if tag == "map":
        _keys(obj, "t", "entries")
        return SMap(_entries(obj["entries"], "map"))
    if tag == "rec":
        _keys(obj, "t", "class", "fields")
        return SRec(_str(obj["class"]), _entries(obj["fields"], "record"))
    if tag == "ref":
        _keys(obj, "t", "id", "class")
        if not _OBJECT_ID.fullmatch(_str(obj["id"])):
            raise FormatError(f"bad object id {obj['id']!r}")
        return SRef(obj["id"], _str(obj["class"]))
    if tag == "exc":
        _keys(obj, "t", "type", "msg")
        return SExc(_str(obj["type"]), _str(obj["msg"]))
    raise FormatError(f"unknown value tag {tag!r}")


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None


def canonical_decode(text: str):
    v = decode_value(_loads(text))
    if canonical_encode(v) != text:
        raise FormatError("non-canonical value encoding")
    return v


# -- snapshot lines ------------------------------------------------------------


def encode_header(s: Snapshot) -> str:
    return (
        '{"version":' + str(s.version) + ',"test":' + _s(s.test)
        + ',"project":' + _s(s.project) + ',"library":' + _s(s.library) + "}"
    )


def encode_interaction(i: Interaction) -> str:
    recv = "null" if i.recv is None else _s(i.recv)
    args = ",".join(canonical_encode(a) for a in i.args)
    return (
        '{"seq":' + str(i.seq) + ',"method":' + _s(i.method) + ',"recv":' + recv
        + ',"args":[' + args + '],"result":' + canonical_encode(i.result) + "}"
    )


def encode_footer(s: Snapshot) -> str:
    detail = "null" if s.detail is None else _s(s.detail)
    return '{"end":true,"status":' + _s(s.status) + ',"detail":' + detail + "}"


def encode_snapshot(s: Snapshot) -> str:
    lines = [encode_header(s)]
    lines.extend(encode_interaction(i) for i in s.interactions)
    lines.append(encode_footer(s))
    return "\n".join(lines) + "\n"


def _decode_interaction(obj) -> Interaction:
    if not isinstance(obj, dict):
        raise FormatError("interaction line must be an object")
    _keys(obj, "seq", "method", "recv", "args", "result")
    seq = obj["seq"]
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise FormatError("seq must be an integer")
    recv = obj["recv"]
    if recv is not None and not (isinstance(recv, str) and _OBJECT_ID.fullmatch(recv)):
        raise FormatError(f"bad receiver {recv!r}")
    if not isinstance(obj["args"], list):
        raise FormatError("args must be a list")
    args = tuple(decode_value(a) for a in obj["args"])
    return Interaction(seq, _str(obj["method"]), recv, args, decode_value(obj["result"]))


def decode_snapshot(text: str, path=None) -> Snapshot:
    try:
        return _decode_snapshot(text, path)
    except TruncatedSnapshot:
        raise
    except FormatError as exc:
        if exc.path is None and path is not None:
            raise FormatError(str(exc), path) from None
        raise


def _decode_snapshot(text: str, path) -> Snapshot:
    lines = text.split("\n")
    complete = lines[-1] == ""
    # a final line without newline is a write that never finished
    lines = lines[:-1]
    if not lines:
        raise FormatError("empty snapshot file", path)
    header_text = lines[0]
    header = _loads(header_text)
    if not isinstance(header, dict) or header.get("version") != SNAPSHOT_VERSION:
        raise FormatError(f"unsupported snapshot version {header.get('version') if isinstance(header, dict) else header!r}", path)
    _keys(header, "version", "test", "project", "library")
    base = Snapshot(_str(header["test"]), _str(header["project"]), _str(header["library"]), (), "passed")
    if encode_header(base) != header_text:
        raise FormatError("non-canonical header line", path)
    interactions: list[Interaction] = []
    for n, line in enumerate(lines[1:], start=2):
        obj = _loads(line)
        if isinstance(obj, dict) and "end" in obj:
            _keys(obj, "end", "status", "detail")
            if obj["end"] is not True or obj["status"] not in STATUSES:
                raise FormatError(f"line {n}: bad footer", path)
            if obj["detail"] is not None:
                _str(obj["detail"])
            if n != len(lines):
                raise FormatError(f"line {n}: content after footer", path)
            snap = Snapshot(base.test, base.project, base.library, tuple(interactions), obj["status"], obj["detail"])
            if encode_footer(snap) != line:
                raise FormatError(f"line {n}: non-canonical footer", path)
            if not complete:
                raise FormatError("missing final newline", path)
            return snap
        inter = _decode_interaction(obj)
        if inter.seq != len(interactions) + 1:
            raise FormatError(f"line {n}: seq {inter.seq} breaks contiguity (expected {len(interactions) + 1})", path)
        if encode_interaction(inter) != line:
            raise FormatError(f"line {n}: non-canonical interaction", path)
        interactions.append(inter)
    partial = Snapshot(base.test, base.project, base.library, tuple(interactions), "errored", "truncated")
    raise TruncatedSnapshot("snapshot has no footer", partial, path)


# -- files ----------------------------------------------------------------------


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def snapshot_filename(test_id: str) -> str:
    return test_id.replace("::", "__") + SUFFIX


def write_snapshot(s: Snapshot, directory) -> Path:
    path = Path(directory) / snapshot_filename(s.test)
    atomic_write(path, encode_snapshot(s))
    return path


def read_snapshot(path) -> Snapshot:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read: {exc.strerror}", path) from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise FormatError("not UTF-8", path) from None
    return decode_snapshot(text, path)


def snapshot_paths(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FormatError("not a snapshot directory", directory)
    return sorted(p for p in directory.iterdir() if p.name.endswith(SUFFIX))


def write_flaky(directory, flaky) -> Path:
    path = Path(directory) / FLAKY_FILE
    atomic_write(path, json.dumps({"version": 1, "flaky": sorted(flaky)}, indent=2) + "\n")
    return path


def read_flaky(directory) -> list[str]:
    path = Path(directory) / FLAKY_FILE
    if not path.exists():
        return []
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(str(exc), path) from None
    if not isinstance(data, dict) or data.get("version") != 1 or not isinstance(data.get("flaky"), list):
        raise FormatError("bad flaky list", path)
    return [_str(t) for t in data["flaky"]]
