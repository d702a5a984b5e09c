"""Snapshot comparison and BBC reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, TestIdMismatch, TruncatedSnapshot
from .model import SExc, SList, SMap, SRec, SRef, Snapshot
from .snapstore import atomic_write, canonical_encode, read_flaky, read_snapshot, snapshot_paths

REPORT_VERSION = 1

PROTOCOL_CHANGE = "PROTOCOL_CHANGE"
INPUT_CHANGE = "INPUT_CHANGE"
VALUE_CHANGE = "VALUE_CHANGE"
EXCEPTION_CHANGE = "EXCEPTION_CHANGE"
LENGTH_CHANGE = "LENGTH_CHANGE"
OUTCOME_CHANGE = "OUTCOME_CHANGE"
MISSING_TEST = "MISSING_TEST"
EXTRA_TEST = "EXTRA_TEST"
CATEGORIES = (
    PROTOCOL_CHANGE, INPUT_CHANGE, VALUE_CHANGE, EXCEPTION_CHANGE,
    LENGTH_CHANGE, OUTCOME_CHANGE, MISSING_TEST, EXTRA_TEST,
)
COUNT_KEYS = ("compared", "identical", "differing", "missing", "extra", "flaky_excluded")


@dataclass(frozen=True)
class Finding:
    test: str
    position: int
    category: str
    method: str | None = None
    old: str | None = None
    new: str | None = None


@dataclass(frozen=True)
class Report:
    baseline: str
    candidate: str
    findings: tuple
    counts: dict = field(default_factory=dict)


class _Bijection:
    """Old-to-new object id correspondence, grown at first occurrences."""

    def __init__(self):
        self.fwd: dict[str, str] = {}
        self.back: dict[str, str] = {}

    def match(self, a: str, b: str) -> bool:
        if a in self.fwd:
            return self.fwd[a] == b
        if b in self.back:
            return False
        self.fwd[a] = b
        self.back[b] = a
        return True


def _same(a, b, bij: _Bijection, exc_type_only: bool) -> bool:
    if type(a) is not type(b):
        return False
    t = type(a)
    if t is SRef:
        return a.cls == b.cls and bij.match(a.id, b.id)
    if t is SList:
        return (
            a.fixed == b.fixed
            and len(a.items) == len(b.items)
            and all(_same(x, y, bij, exc_type_only) for x, y in zip(a.items, b.items))
        )
    if t is SMap or t is SRec:
        ea, eb = (a.entries, b.entries) if t is SMap else (a.fields, b.fields)
        if t is SRec and a.cls != b.cls:
            return False
        return len(ea) == len(eb) and all(
            ka == kb and _same(va, vb, bij, exc_type_only) for (ka, va), (kb, vb) in zip(ea, eb)
        )
    if t is SExc:
        return a.type == b.type and (exc_type_only or a.msg == b.msg)
    return a == b


def _json(s: str | None) -> str:
    return "null" if s is None else json.dumps(s, ensure_ascii=False)


def _args_text(args) -> str:
    return "[" + ",".join(canonical_encode(a) for a in args) + "]"


def _compare_interaction(a, b, bij: _Bijection, exc_type_only: bool):
    if a.method != b.method:
        return PROTOCOL_CHANGE, _json(a.method), _json(b.method)
    if (a.recv is None) != (b.recv is None) or (a.recv is not None and not bij.match(a.recv, b.recv)):
        return PROTOCOL_CHANGE, _json(a.recv), _json(b.recv)
    if len(a.args) != len(b.args) or not all(
        _same(x, y, bij, exc_type_only) for x, y in zip(a.args, b.args)
    ):
        return INPUT_CHANGE, _args_text(a.args), _args_text(b.args)
    a_exc, b_exc = isinstance(a.result, SExc), isinstance(b.result, SExc)
    if a_exc or b_exc:
        if not (a_exc and b_exc) or not _same(a.result, b.result, bij, exc_type_only):
            return EXCEPTION_CHANGE, canonical_encode(a.result), canonical_encode(b.result)
        return None
    if not _same(a.result, b.result, bij, exc_type_only):
        return VALUE_CHANGE, canonical_encode(a.result), canonical_encode(b.result)
    return None


def _tail_findings(old: Snapshot, new: Snapshot) -> list[Finding]:
    n_old, n_new = len(old.interactions), len(new.interactions)
    if n_old != n_new:
        n = min(n_old, n_new)
        extra = (old.interactions if n_old > n_new else new.interactions)[n]
        return [Finding(old.test, n + 1, LENGTH_CHANGE, extra.method, str(n_old), str(n_new))]
    if old.status != new.status:
        return [Finding(old.test, n_old + 1, OUTCOME_CHANGE, None, _json(old.status), _json(new.status))]
    return []


def compare_snapshots(old: Snapshot, new: Snapshot, exc_type_only: bool = False) -> Finding | None:
    """First divergence between two snapshots of the same test, or None."""
    if old.test != new.test:
        raise TestIdMismatch(f"{old.test!r} != {new.test!r}")
    bij = _Bijection()
    for a, b in zip(old.interactions, new.interactions):
        diff = _compare_interaction(a, b, bij, exc_type_only)
        if diff is not None:
            return Finding(old.test, a.seq, diff[0], a.method, diff[1], diff[2])
    tail = _tail_findings(old, new)
    return tail[0] if tail else None


def compare_snapshots_all(old: Snapshot, new: Snapshot, exc_type_only: bool = False) -> list[Finding]:
    """Positional comparison to the end; later findings may be noise."""
    if old.test != new.test:
        raise TestIdMismatch(f"{old.test!r} != {new.test!r}")
    bij = _Bijection()
    findings = []
    for a, b in zip(old.interactions, new.interactions):
        diff = _compare_interaction(a, b, bij, exc_type_only)
        if diff is not None:
            findings.append(Finding(old.test, a.seq, diff[0], a.method, diff[1], diff[2]))
    findings.extend(_tail_findings(old, new))
    if len(old.interactions) != len(new.interactions) and old.status != new.status:
        n = max(len(old.interactions), len(new.interactions))
        findings.append(Finding(old.test, n + 1, OUTCOME_CHANGE, None, _json(old.status), _json(new.status)))
    return findings


def _truncation_finding(old: Snapshot, partial: Snapshot, exc_type_only: bool) -> Finding:
    bij = _Bijection()
    for a, b in zip(old.interactions, partial.interactions):
        diff = _compare_interaction(a, b, bij, exc_type_only)
        if diff is not None:
            return Finding(old.test, a.seq, diff[0], a.method, diff[1], diff[2])
    k = len(partial.interactions)
    method = old.interactions[k].method if k < len(old.interactions) else None
    return Finding(old.test, k + 1, PROTOCOL_CHANGE, method, _json(method), "null")


def compare_snapshot_sets(old: dict, new: dict, flaky=(), exc_type_only: bool = False,
                          all_divergences: bool = False, truncated=frozenset()) -> Report:
    """Compare two ``test id -> Snapshot`` maps.

    Tests in ``truncated`` are candidate snapshots whose recording never
    finished; a divergence inside the readable part wins, otherwise the
    truncation point is reported as a protocol change.
    """
    flaky = set(flaky)
    ids = sorted((set(old) | set(new)) - flaky)
    counts = dict.fromkeys(COUNT_KEYS, 0)
    counts["flaky_excluded"] = len((set(old) | set(new)) & flaky)
    findings: list[Finding] = []
    for test_id in ids:
        if test_id not in new:
            counts["missing"] += 1
            findings.append(Finding(test_id, 0, MISSING_TEST))
            continue
        if test_id not in old:
            counts["extra"] += 1
            findings.append(Finding(test_id, 0, EXTRA_TEST))
            continue
        counts["compared"] += 1
        if test_id in truncated:
            found = [_truncation_finding(old[test_id], new[test_id], exc_type_only)]
        elif all_divergences:
            found = compare_snapshots_all(old[test_id], new[test_id], exc_type_only)
        else:
            f = compare_snapshots(old[test_id], new[test_id], exc_type_only)
            found = [f] if f else []
        if found:
            counts["differing"] += 1
            findings.extend(found)
        else:
            counts["identical"] += 1

    def fingerprint(snaps: dict) -> str:
        return snaps[min(snaps)].library if snaps else ""

    return Report(fingerprint(old), fingerprint(new), tuple(findings), counts)


def read_snapshot_dir(directory, allow_truncated: bool = False):
    """Return ``(snapshots, truncated ids)`` for every snapshot file in ``directory``."""
    snaps: dict[str, Snapshot] = {}
    truncated = set()
    for path in snapshot_paths(directory):
        try:
            snap = read_snapshot(path)
        except TruncatedSnapshot as exc:
            if not allow_truncated:
                raise
            snap = exc.partial
            truncated.add(snap.test)
        if snap.test in snaps:
            raise FormatError(f"duplicate test id {snap.test!r}", path)
        snaps[snap.test] = snap
    return snaps, truncated


def compare_sets(old_dir, new_dir, flaky=(), exc_type_only: bool = False, all_divergences: bool = False) -> Report:
    old, _ = read_snapshot_dir(old_dir)
    new, truncated = read_snapshot_dir(new_dir, allow_truncated=True)
    excluded = set(flaky) | set(read_flaky(old_dir)) | set(read_flaky(new_dir))
    return compare_snapshot_sets(old, new, excluded, exc_type_only, all_divergences, truncated)


# -- rendering ----------------------------------------------------------------


def report_to_dict(r: Report) -> dict:
    return {
        "version": REPORT_VERSION,
        "baseline": r.baseline,
        "candidate": r.candidate,
        "counts": {k: r.counts.get(k, 0) for k in COUNT_KEYS},
        "findings": [
            {"test": f.test, "position": f.position, "category": f.category,
             "method": f.method, "old": f.old, "new": f.new}
            for f in r.findings
        ],
    }


def total_tests(r: Report) -> int:
    return r.counts.get("compared", 0) + r.counts.get("missing", 0) + r.counts.get("extra", 0)


def render_report(r: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(r), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    dash = "-"
    lines = [
        f"{f.test} :: {f.position} :: {f.category} :: {f.method or dash} :: "
        f"{f.old if f.old is not None else dash} -> {f.new if f.new is not None else dash}"
        for f in r.findings
    ]
    n = len(r.findings)
    lines.append(f"{n} finding{'' if n == 1 else 's'} across {total_tests(r)} tests")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Report:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid report JSON: {exc}") from None
    if not isinstance(data, dict) or data.get("version") != REPORT_VERSION:
        raise FormatError("unsupported report version")
    try:
        findings = tuple(
            Finding(f["test"], f["position"], f["category"], f["method"], f["old"], f["new"])
            for f in data["findings"]
        )
        return Report(data["baseline"], data["candidate"], findings, dict(data["counts"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed report: {exc}") from None


def write_report(r: Report, path, fmt: str = "json") -> None:
    atomic_write(Path(path), render_report(r, fmt))
