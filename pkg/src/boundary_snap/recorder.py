"""Probe sink that turns boundary calls into snapshots."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FingerprintMismatch, PreconditionError, SerializeError
from .minilang.interpreter import Interpreter
from .minilang.project import Project
from .minilang.values import ExcValue, Instance, MList, MMap
from .model import (
    Interaction,
    SBool,
    SExc,
    SFloat,
    SInt,
    SList,
    SMap,
    SNull,
    SRef,
    SStr,
    Snapshot,
    smap,
    srec,
)
from .snapstore import encode_snapshot


class ObjectRegistry:
    """Per-test map from runtime objects to ``o1``, ``o2``, ... in first-seen order."""

    def __init__(self):
        self._ids: dict[int, tuple[object, str]] = {}

    def id_for(self, obj) -> str:
        entry = self._ids.get(id(obj))
        if entry is None:
            # keep obj alive so its id() is never reused within the test
            entry = (obj, f"o{len(self._ids) + 1}")
            self._ids[id(obj)] = entry
        return entry[1]

    def __len__(self) -> int:
        return len(self._ids)


def serialize(value, registry: ObjectRegistry, _active: frozenset = frozenset()):
    if value is None:
        return SNull()
    if isinstance(value, bool):
        return SBool(value)
    if isinstance(value, int):
        return SInt(value)
    if isinstance(value, float):
        return SFloat(value)
    if isinstance(value, str):
        return SStr(value)
    if isinstance(value, ExcValue):
        return SExc(value.type, value.message)
    if isinstance(value, Instance) and not value.record:
        return SRef(registry.id_for(value), value.class_id)
    if id(value) in _active:
        raise SerializeError(f"cyclic {type(value).__name__} value")
    active = _active | {id(value)}
    if isinstance(value, MList):
        return SList(tuple(serialize(x, registry, active) for x in value.items), value.fixed)
    if isinstance(value, MMap):
        return smap((k, serialize(x, registry, active)) for k, x in value.entries.items())
    if isinstance(value, Instance):
        return srec(value.class_id, ((k, serialize(x, registry, active)) for k, x in value.fields.items()))
    raise SerializeError(f"cannot serialize {value!r}")


def materialize(v):
    """Rebuild a runtime value from a by-value serialization (no refs)."""
    t = type(v)
    if t is SNull:
        return None
    if t in (SBool, SInt, SFloat, SStr):
        return v.v
    if t is SExc:
        return ExcValue(v.type, v.msg)
    if t is SList:
        return MList([materialize(x) for x in v.items], v.fixed)
    if t is SMap:
        return MMap({k: materialize(x) for k, x in v.entries})
    raise ValueError(f"cannot materialize {v!r}")


class Recorder:
    """Probe sink for one test run.

    Arguments are serialized on entry (pre-call state), results on exit. An
    interaction is appended when its call completes, so nested calls land
    inner-first. Methods outside ``symbols`` are ignored.
    """

    def __init__(self, symbols=None):
        self.symbols = None if symbols is None else frozenset(symbols)
        self.registry = ObjectRegistry()
        self.interactions: list[Interaction] = []

    def on_boundary_call(self, method: str, receiver, args):
        if self.symbols is not None and method not in self.symbols:
            return None
        recv = None if receiver is None else self.registry.id_for(receiver)
        return method, recv, tuple(serialize(a, self.registry) for a in args)

    def on_boundary_return(self, token, result=None, exception=None):
        if token is None:
            return
        method, recv, args = token
        if exception is not None:
            out = SExc(exception.type, exception.message)
        else:
            out = self.serialize_result(result)
        self.interactions.append(Interaction(len(self.interactions) + 1, method, recv, args, out))

    def serialize_result(self, result):
        return serialize(result, self.registry)


def _check_footprint(project: Project, footprint) -> None:
    if footprint.fingerprint != project.fingerprint:
        raise FingerprintMismatch(
            f"footprint fingerprint {footprint.fingerprint[:12]} does not match project {project.fingerprint[:12]}"
        )


def record_snapshot(project: Project, test_id: str, sink: Recorder, record_internal: bool = False) -> Snapshot:
    outcome = Interpreter(project, sink, record_internal).run_test(test_id)
    return Snapshot(
        test=test_id,
        project=project.fingerprint,
        library=project.library_fingerprint,
        interactions=tuple(sink.interactions),
        status=outcome.status,
        detail=outcome.detail,
    )


def record_snapshots(project: Project, footprint, sink_factory=None, record_internal: bool = False,
                     tests=None) -> dict[str, Snapshot]:
    """Record one snapshot per test. ``sink_factory(test_id)`` may supply the sink."""
    _check_footprint(project, footprint)
    snaps = {}
    for ref in project.tests():
        if tests is not None and ref.test_id not in tests:
            continue
        sink = sink_factory(ref.test_id) if sink_factory else Recorder(footprint.symbols)
        snaps[ref.test_id] = record_snapshot(project, ref.test_id, sink, record_internal)
    return snaps


@dataclass(frozen=True)
class Stability:
    stable: list
    flaky: list
    snapshots: dict  # first-run snapshots of the stable tests

    def __iter__(self):
        return iter((self.stable, self.flaky))


def stability_filter(project: Project, footprint, runs: int = 2, sink_factory=None,
                     record_internal: bool = False) -> Stability:
    """Record ``runs`` times; a test whose encodings ever differ is flaky.

    ``sink_factory(run, test_id)`` (run counted from 1) overrides the sink.
    """
    if runs < 2:
        raise PreconditionError(f"stability filter needs at least 2 runs, got {runs}")
    recordings = []
    for run in range(1, runs + 1):
        factory = None
        if sink_factory is not None:
            factory = lambda test_id, run=run: sink_factory(run, test_id)  # noqa: E731
        recordings.append(record_snapshots(project, footprint, factory, record_internal))
    first = recordings[0]
    stable, flaky = [], []
    for test_id, snap in first.items():
        encoded = encode_snapshot(snap)
        if all(encode_snapshot(r[test_id]) == encoded for r in recordings[1:]):
            stable.append(test_id)
        else:
            flaky.append(test_id)
    return Stability(stable, flaky, {t: first[t] for t in stable})
