"""Extreme-mutation campaign: tests versus snapshots as BBC detectors."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .differ import compare_snapshot_sets
from .errors import EmptyMatrix, PreconditionError, UnknownTarget
from .minilang import ast
from .minilang.parser import parse_expression
from .minilang.project import Project
from .model import SBool, SFloat, SInt, SList, SMap, SStr
from .recorder import record_snapshots

MODES = ("null", "observed")
CAMPAIGN_VERSION = 1
CSV_HEADER = ("target", "killed_by_tests", "killed_by_snapshots", "category", "position")

_ZERO = {SInt: "0", SFloat: "0.0", SBool: "false", SStr: '""', SList: "[]", SMap: "{}"}


@dataclass(frozen=True)
class MutationTarget:
    method: str
    mode: str = "null"


@dataclass(frozen=True)
class KillRow:
    target: str
    default: str
    killed_by_tests: bool
    killed_by_snapshots: bool
    category: str | None = None
    position: int | None = None
    test: str | None = None
    diagnostic: str | None = None


@dataclass(frozen=True)
class KillMatrix:
    rows: tuple
    mode: str = "null"

    @property
    def mutants(self) -> int:
        return len(self.rows)

    @property
    def tests_killed(self) -> int:
        return sum(r.killed_by_tests for r in self.rows)

    @property
    def snapshots_killed(self) -> int:
        return sum(r.killed_by_snapshots for r in self.rows)

    @property
    def survivors(self) -> list[KillRow]:
        return [r for r in self.rows if not (r.killed_by_tests or r.killed_by_snapshots)]


def list_targets(baseline, mode: str = "null") -> list[MutationTarget]:
    """One target per method reached in ``baseline``; constructors excluded."""
    snaps = baseline.values() if isinstance(baseline, dict) else baseline
    methods = {i.method for s in snaps for i in s.interactions}
    return [MutationTarget(m, mode) for m in sorted(methods) if not m.endswith("#init")]


def infer_default(target: MutationTarget, baseline) -> str:
    if target.mode == "null":
        return "null"
    if target.mode != "observed":
        raise ValueError(f"unknown default mode {target.mode!r}")
    snaps = baseline.values() if isinstance(baseline, dict) else baseline
    kinds = {type(i.result) for s in snaps for i in s.interactions if i.method == target.method}
    if not kinds:
        raise PreconditionError(f"{target.method} never reached in the baseline")
    if len(kinds) == 1:
        return _ZERO.get(kinds.pop(), "null")
    return "null"


def _locate(project: Project, method: str):
    mod_name, sep, rest = method.partition("::")
    if not sep:
        raise UnknownTarget(method)
    try:
        mod = project.module(mod_name)
    except KeyError:
        raise UnknownTarget(method) from None
    if mod.kind != "library":
        raise UnknownTarget(method)
    cls_name, _, meth_name = rest.partition("#")
    decl = mod.declaration(cls_name)
    if meth_name:
        if not isinstance(decl, ast.ClassDecl) or decl.method(meth_name) is None:
            raise UnknownTarget(method)
    elif not isinstance(decl, ast.FnDecl):
        raise UnknownTarget(method)
    return mod, decl, meth_name


def apply_mutation(project: Project, method: str, default: str) -> Project:
    """Copy of ``project`` whose ``method`` body is just ``return <default>;``."""
    mod, decl, meth_name = _locate(project, method)
    body = (ast.Return(parse_expression(default)),)
    if meth_name:
        methods = tuple(replace(m, body=body) if m.name == meth_name else m for m in decl.methods)
        new_decl = replace(decl, methods=methods)
    else:
        new_decl = replace(decl, body=body)
    decls = tuple(new_decl if d is decl else d for d in mod.declarations)
    tag = hashlib.sha256(f"{project.library_fingerprint}\0{method}\0{default}".encode()).hexdigest()
    return project.replace_module(replace(mod, declarations=decls), library_fingerprint=tag)


def _run_target(args) -> KillRow:
    project, footprint, baseline, target, exclude, record_internal = args
    default = "null"
    try:
        default = infer_default(target, baseline)
        mutant = apply_mutation(project, target.method, default)
        snaps = record_snapshots(mutant, footprint, record_internal=record_internal, tests=set(baseline))
    except Exception as exc:  # noqa: BLE001 - any failure becomes a row diagnostic
        return KillRow(target.method, default, False, False, diagnostic=f"{type(exc).__name__}: {exc}")
    killed_by_tests = any(s.status != "passed" for t, s in snaps.items() if t not in exclude)
    report = compare_snapshot_sets(baseline, snaps, exclude)
    first = report.findings[0] if report.findings else None
    return KillRow(
        target=target.method,
        default=default,
        killed_by_tests=killed_by_tests,
        killed_by_snapshots=first is not None,
        category=first.category if first else None,
        position=first.position if first else None,
        test=first.test if first else None,
    )


def run_campaign(project: Project, footprint, baseline: dict, mode: str = "null", flaky=(),
                 jobs: int = 1, record_internal: bool = False, targets=None) -> KillMatrix:
    """Mutate each reached method in turn and record who notices.

    ``baseline`` maps test ids to snapshots recorded on the unmutated
    library; every footer must be ``passed``.
    """
    failing = sorted(t for t, s in baseline.items() if s.status != "passed" and t not in set(flaky))
    if failing:
        raise PreconditionError(f"baseline has non-passing tests: {', '.join(failing)}")
    exclude = frozenset(flaky)
    kept = {t: s for t, s in baseline.items() if t not in exclude}
    if targets is None:
        targets = list_targets(kept, mode)
    work = [(project, footprint, kept, t, exclude, record_internal) for t in targets]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_target, work))
    else:
        rows = [_run_target(w) for w in work]
    return KillMatrix(tuple(rows), mode)


def default_jobs() -> int:
    return os.cpu_count() or 1


def mutation_scores(m: KillMatrix) -> tuple[float, float]:
    if m.mutants == 0:
        raise EmptyMatrix("no mutants in kill matrix")
    return m.tests_killed / m.mutants, m.snapshots_killed / m.mutants


def format_score(x: float) -> str:
    return f"{x:.3f}"


# -- persistence -----------------------------------------------------------------


def _bool(b: bool) -> str:
    return "true" if b else "false"


def matrix_to_csv(m: KillMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in m.rows:
        w.writerow([
            r.target,
            _bool(r.killed_by_tests),
            _bool(r.killed_by_snapshots),
            r.category or "",
            "" if r.position is None else r.position,
        ])
    return buf.getvalue()


def matrix_to_dict(m: KillMatrix) -> dict:
    data = {
        "version": CAMPAIGN_VERSION,
        "mode": m.mode,
        "rows": [
            {
                "target": r.target,
                "default": r.default,
                "killed_by_tests": r.killed_by_tests,
                "killed_by_snapshots": r.killed_by_snapshots,
                "category": r.category,
                "position": r.position,
                "test": r.test,
                "diagnostic": r.diagnostic,
            }
            for r in m.rows
        ],
        "totals": {
            "mutants": m.mutants,
            "killed_by_tests": m.tests_killed,
            "killed_by_snapshots": m.snapshots_killed,
            "survived_both": len(m.survivors),
        },
    }
    if m.mutants:
        tests, snaps = mutation_scores(m)
        data["scores"] = {"tests": format_score(tests), "snapshots": format_score(snaps)}
    return data


def matrix_to_json(m: KillMatrix) -> str:
    return json.dumps(matrix_to_dict(m), indent=2, sort_keys=True) + "\n"


def matrix_from_dict(data: dict) -> KillMatrix:
    rows = tuple(
        KillRow(r["target"], r["default"], r["killed_by_tests"], r["killed_by_snapshots"],
                r["category"], r["position"], r["test"], r["diagnostic"])
        for r in data["rows"]
    )
    return KillMatrix(rows, data["mode"])
