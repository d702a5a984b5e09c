"""Loading and linking of MiniLang projects described by ``manifest.json``."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import ast
from .builtins import BUILTINS, TEST_ONLY_BUILTINS
from .errors import LinkError, ManifestError
from .parser import parse

MANIFEST_KEYS = ("name", "library_dirs", "client_dirs", "test_dirs")
ROLE_KINDS = {"library_dirs": "library", "client_dirs": "client", "test_dirs": "test"}
_MODULE_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def fingerprint(pairs) -> str:
    """SHA-256 over sorted ``(path, content)`` pairs."""
    h = hashlib.sha256()
    for path, content in sorted(pairs):
        h.update(path.encode("utf-8"))
        h.update(b"\0")
        h.update(content.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


@dataclass(frozen=True)
class TestRef:
    test_id: str
    module: ast.Module
    decl: ast.TestDecl


@dataclass(frozen=True)
class Project:
    name: str
    modules: tuple  # sorted by path
    fingerprint: str  # client + test sources
    library_fingerprint: str
    root: str = field(default="", compare=False)

    def __post_init__(self):
        globals_: dict[str, tuple[ast.Module, object]] = {}
        for mod in self.modules:
            for decl in mod.declarations:
                if isinstance(decl, ast.TestDecl):
                    continue
                if decl.name in globals_:
                    other = globals_[decl.name][0]
                    raise LinkError(f"{decl.name!r} declared in both {other.name} and {mod.name}")
                if decl.name in BUILTINS or decl.name in TEST_ONLY_BUILTINS:
                    raise LinkError(f"{mod.name}: {decl.name!r} shadows a builtin")
                globals_[decl.name] = (mod, decl)
        object.__setattr__(self, "globals", globals_)
        classes = {
            f"{mod.name}::{decl.name}": (mod, decl)
            for mod, decl in globals_.values()
            if isinstance(decl, ast.ClassDecl)
        }
        object.__setattr__(self, "classes", classes)

    # -- views -------------------------------------------------------------

    def modules_of(self, kind: str) -> list[ast.Module]:
        return [m for m in self.modules if m.kind == kind]

    def module(self, name: str) -> ast.Module:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    @property
    def api_symbols(self) -> tuple[str, ...]:
        symbols = set()
        for mod in self.modules_of("library"):
            for decl in mod.declarations:
                if not getattr(decl, "exported", False):
                    continue
                if isinstance(decl, ast.FnDecl):
                    symbols.add(f"{mod.name}::{decl.name}")
                else:
                    symbols.add(f"{mod.name}::{decl.name}#init")
                    symbols.update(f"{mod.name}::{decl.name}#{m.name}" for m in decl.methods)
        return tuple(sorted(symbols))

    def tests(self) -> list[TestRef]:
        refs = []
        for mod in self.modules_of("test"):
            for decl in mod.tests:
                refs.append(TestRef(f"{mod.name}::{decl.name}", mod, decl))
        return refs

    def test(self, test_id: str) -> TestRef:
        for ref in self.tests():
            if ref.test_id == test_id:
                return ref
        raise KeyError(f"no test {test_id!r}")

    def replace_module(self, module: ast.Module, library_fingerprint: str | None = None) -> "Project":
        mods = tuple(module if m.name == module.name else m for m in self.modules)
        return dataclasses.replace(
            self,
            modules=mods,
            library_fingerprint=library_fingerprint or self.library_fingerprint,
        )


# -- static link check -------------------------------------------------------


def _bound_names(params, body) -> set[str]:
    names = set(params)
    for node in ast.walk(body):
        if isinstance(node, ast.Let):
            names.add(node.name)
        elif isinstance(node, ast.ForIn):
            names.add(node.var)
        elif isinstance(node, ast.Try):
            names.add(node.var)
    return names


def _visible(user: ast.Module, owner: ast.Module, decl) -> str | None:
    """Return a reason string when ``user`` may not reference ``decl``."""
    if user.kind == "library":
        if owner.kind != "library":
            return f"library code cannot reference {owner.kind} symbol"
        return None
    if owner.kind == "library":
        return None if decl.exported else "not exported"
    if owner.kind == "test" and user.kind != "test":
        return "client code cannot reference test symbol"
    return None


def _check_body(project: Project, mod: ast.Module, where: str, params, body, in_method: bool) -> None:
    bound = _bound_names(params, body)
    for node in ast.walk(body):
        if isinstance(node, ast.SelfRef) and not in_method:
            raise LinkError(f"{mod.path}:{node.pos[0]}: 'self' outside a method in {where}")
        if isinstance(node, ast.Call):
            name = node.name
            if name in BUILTINS or (name in TEST_ONLY_BUILTINS and mod.kind == "test"):
                continue
            target = project.globals.get(name)
            if target is None:
                raise LinkError(f"{mod.path}:{node.pos[0]}: call to undeclared {name!r} in {where}")
            reason = _visible(mod, target[0], target[1])
            if reason:
                raise LinkError(f"{mod.path}:{node.pos[0]}: {target[0].name}::{name} is {reason}")
        elif isinstance(node, ast.Name):
            if node.name in bound:
                continue
            if node.name in project.globals or node.name in BUILTINS:
                raise LinkError(f"{mod.path}:{node.pos[0]}: {node.name!r} used as a value in {where}")
            raise LinkError(f"{mod.path}:{node.pos[0]}: undeclared name {node.name!r} in {where}")


def link(project: Project) -> None:
    for mod in project.modules:
        for decl in mod.declarations:
            if isinstance(decl, ast.FnDecl):
                _check_body(project, mod, decl.name, decl.params, decl.body, False)
            elif isinstance(decl, ast.ClassDecl):
                for m in decl.methods:
                    _check_body(project, mod, f"{decl.name}.{m.name}", m.params, m.body, True)
            else:
                _check_body(project, mod, f"test {decl.name}", (), decl.body, False)


# -- manifest loading --------------------------------------------------------


def read_manifest(root: Path) -> dict:
    path = root / "manifest.json"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"{path}: missing manifest") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    for key in MANIFEST_KEYS:
        if key not in data:
            raise ManifestError(f"{path}: missing key {key!r}")
    if not isinstance(data["name"], str):
        raise ManifestError(f"{path}: 'name' must be a string")
    for key in MANIFEST_KEYS[1:]:
        dirs = data[key]
        if not isinstance(dirs, list) or not all(isinstance(d, str) for d in dirs):
            raise ManifestError(f"{path}: {key!r} must be a list of strings")
        for d in dirs:
            if "\\" in d or d.startswith("/"):
                raise ManifestError(f"{path}: {d!r} must be a relative forward-slash path")
    return data


def load_project(root) -> Project:
    """Parse and link every source file listed by ``root/manifest.json``."""
    root = Path(root)
    manifest = read_manifest(root)
    modules: list[ast.Module] = []
    hashed: dict[str, list[tuple[str, str]]] = {"library": [], "client": [], "test": []}
    names: dict[str, str] = {}
    for key in MANIFEST_KEYS[1:]:
        kind = ROLE_KINDS[key]
        for rel_dir in manifest[key]:
            base = root / rel_dir
            if not base.is_dir():
                raise ManifestError(f"{root / 'manifest.json'}: listed directory {rel_dir!r} does not exist")
            for file in sorted(base.rglob("*.mlt")):
                rel_in_dir = file.relative_to(base).as_posix()
                display_path = f"{rel_dir.rstrip('/')}/{rel_in_dir}"
                try:
                    text = file.read_text(encoding="utf-8")
                except UnicodeDecodeError as exc:
                    raise ManifestError(f"{display_path}: not UTF-8 ({exc})") from None
                stem = file.stem
                if not _MODULE_NAME.fullmatch(stem):
                    raise ManifestError(f"{display_path}: module name {stem!r} is not an identifier")
                if stem in names:
                    raise LinkError(f"module {stem!r} defined by both {names[stem]} and {display_path}")
                names[stem] = display_path
                modules.append(parse(text, stem, kind, display_path))
                hashed[kind].append((f"{kind}/{rel_in_dir}", text))
    modules.sort(key=lambda m: m.path)
    project = Project(
        name=manifest["name"],
        modules=tuple(modules),
        fingerprint=fingerprint(hashed["client"] + hashed["test"]),
        library_fingerprint=fingerprint(hashed["library"]),
        root=str(root),
    )
    link(project)
    return project
