"""Client-specific syntactic usage footprint of a library API."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import FormatError
from .minilang import ast
from .minilang.project import Project
from .snapstore import atomic_write

FOOTPRINT_VERSION = 1


@dataclass(frozen=True)
class Footprint:
    symbols: tuple
    fingerprint: str


def extract_footprint(project: Project) -> Footprint:
    """Collect the API symbols client and test code can reach.

    Calls that name an exported function or class resolve statically. For
    ``e.m(...)`` the receiver type is unknown, so every exported class that
    declares ``m`` contributes ``Class#m``.
    """
    api = set(project.api_symbols)
    found = set()
    method_names = set()
    for mod in project.modules:
        if mod.kind == "library":
            continue
        for node in ast.walk(mod.declarations):
            if isinstance(node, ast.Call):
                entry = project.globals.get(node.name)
                if entry is None or entry[0].kind != "library":
                    continue
                owner, decl = entry
                if isinstance(decl, ast.ClassDecl):
                    found.add(f"{owner.name}::{decl.name}#init")
                else:
                    found.add(f"{owner.name}::{decl.name}")
            elif isinstance(node, ast.MethodCall):
                method_names.add(node.method)
    for mod in project.modules_of("library"):
        for decl in mod.declarations:
            if isinstance(decl, ast.ClassDecl) and decl.exported:
                for m in decl.methods:
                    if m.name in method_names:
                        found.add(f"{mod.name}::{decl.name}#{m.name}")
    return Footprint(tuple(sorted(found & api)), project.fingerprint)


def encode_footprint(fp: Footprint) -> str:
    data = {"version": FOOTPRINT_VERSION, "fingerprint": fp.fingerprint, "symbols": list(fp.symbols)}
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_footprint(fp: Footprint, path) -> None:
    atomic_write(path, encode_footprint(fp))


def read_footprint(path) -> Footprint:
    try:
        data = json.loads(open(path, encoding="utf-8").read())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(str(exc), path) from None
    if not isinstance(data, dict):
        raise FormatError("footprint must be a JSON object", path)
    if data.get("version") != FOOTPRINT_VERSION or isinstance(data.get("version"), bool):
        raise FormatError(f"unsupported footprint version {data.get('version')!r}", path)
    if set(data) != {"version", "fingerprint", "symbols"}:
        raise FormatError(f"unexpected keys {sorted(data)}", path)
    symbols = data["symbols"]
    if not isinstance(data["fingerprint"], str) or not isinstance(symbols, list) \
            or not all(isinstance(s, str) for s in symbols):
        raise FormatError("malformed footprint", path)
    if symbols != sorted(set(symbols)):
        raise FormatError("symbols must be sorted and unique", path)
    return Footprint(tuple(symbols), data["fingerprint"])
