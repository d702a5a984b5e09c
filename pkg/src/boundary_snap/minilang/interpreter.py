"""Tree-walking evaluator with probe hooks at the client/library boundary."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from . import ast
from .builtins import BUILTINS, TEST_ONLY_BUILTINS
from .errors import AssertionFailed, Abort, ExecutionLimit, ProbeFailure, Thrown
from .lexer import INT_MAX, INT_MIN
from .project import Project
from .values import ExcValue, Instance, MList, MMap, contains_plain_instance, display, equals, throw, typeof

MAX_STEPS = 200_000
MAX_DEPTH = 150

_ARITY = {name: fn.__code__.co_argcount - 1 for name, fn in {**BUILTINS, **TEST_ONLY_BUILTINS}.items()}


@dataclass(frozen=True)
class TestOutcome:
    test_id: str
    status: str  # passed, failed or errored
    detail: str | None
    stdout: str


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class Env:
    __slots__ = ("vars", "parent")

    def __init__(self, parent: "Env | None" = None):
        self.vars: dict[str, object] = {}
        self.parent = parent

    def lookup(self, name: str):
        env = self
        while env is not None:
            if name in env.vars:
                return env.vars[name]
            env = env.parent
        throw("NameError", f"undefined variable {name!r}")

    def assign(self, name: str, value) -> None:
        env = self
        while env is not None:
            if name in env.vars:
                env.vars[name] = value
                return
            env = env.parent
        throw("NameError", f"assignment to undeclared variable {name!r}")


class Frame:
    __slots__ = ("module", "self_obj")

    def __init__(self, module: ast.Module, self_obj=None):
        self.module = module
        self.self_obj = self_obj


def _check_int(v: int) -> int:
    if not INT_MIN <= v <= INT_MAX:
        throw("ArithmeticError", "integer overflow")
    return v


def _check_float(v: float) -> float:
    if math.isinf(v) or math.isnan(v):
        throw("ArithmeticError", "float overflow")
    return v


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _arith(op: str, a, b):
    if op == "+":
        if isinstance(a, str) and isinstance(b, str):
            return a + b
        if isinstance(a, MList) and isinstance(b, MList):
            return MList(a.items + b.items)
    if not (_is_num(a) and _is_num(b)):
        throw("TypeError", f"unsupported operands for {op}: {typeof(a)} and {typeof(b)}")
    if isinstance(a, int) and isinstance(b, int):
        if op == "+":
            return _check_int(a + b)
        if op == "-":
            return _check_int(a - b)
        if op == "*":
            return _check_int(a * b)
        if b == 0:
            throw("ArithmeticError", "division by zero" if op == "/" else "modulo by zero")
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        if op == "/":
            return _check_int(q)
        return a - b * q
    a, b = float(a), float(b)
    if op == "+":
        return _check_float(a + b)
    if op == "-":
        return _check_float(a - b)
    if op == "*":
        return _check_float(a * b)
    if b == 0.0:
        throw("ArithmeticError", "division by zero" if op == "/" else "modulo by zero")
    if op == "/":
        return _check_float(a / b)
    return _check_float(math.fmod(a, b))


def _compare(op: str, a, b) -> bool:
    if not ((_is_num(a) and _is_num(b)) or (isinstance(a, str) and isinstance(b, str))):
        throw("TypeError", f"cannot compare {typeof(a)} with {typeof(b)}")
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _bool(v, what: str) -> bool:
    if not isinstance(v, bool):
        throw("TypeError", f"{what} must be bool, got {typeof(v)}")
    return v


class Interpreter:
    """Executes one test at a time; create a fresh instance per test.

    ``probe`` receives ``on_boundary_call(method, receiver, args)`` before a
    boundary call and ``on_boundary_return(token, result=..., exception=...)``
    after it. A boundary call is one whose callee lives in a library module
    and whose immediate caller frame is client or test code. With
    ``record_internal`` library-to-library calls of exported symbols also
    count.
    """

    def __init__(self, project: Project, probe=None, record_internal: bool = False,
                 max_steps: int = MAX_STEPS, max_depth: int = MAX_DEPTH):
        self.project = project
        self.probe = probe
        self.record_internal = record_internal
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.steps = 0
        self.depth = 0
        self.stdout: list[str] = []

    # -- entry points ----------------------------------------------------

    def run_test(self, test_id: str) -> TestOutcome:
        ref = self.project.test(test_id)
        frame = Frame(ref.module)
        status, detail = "passed", None
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 20_000))
        try:
            self.exec_block(ref.decl.body, Env(), frame)
        except _Return:
            pass
        except AssertionFailed as exc:
            status, detail = "failed", str(exc)
        except Thrown as exc:
            status, detail = "errored", f"{exc.value.type}: {exc.value.message}"
        except Abort as exc:
            status, detail = "errored", str(exc)
        finally:
            sys.setrecursionlimit(old_limit)
        return TestOutcome(test_id, status, detail, "".join(self.stdout))

    def call_symbol(self, symbol: str, args: list, receiver=None):
        """Invoke a library symbol directly, as client code would."""
        mod_name, _, rest = symbol.partition("::")
        caller = Frame(ast.Module("<driver>", "client", ()))
        cls_name, _, method = rest.partition("#")
        if not method:
            return self._call_global(cls_name, args, caller, (0, 0))
        if method == "init":
            return self._call_global(cls_name, args, caller, (0, 0))
        return self._call_method(receiver, method, args, caller, (0, 0))

    # -- statements -------------------------------------------------------

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise ExecutionLimit(f"step limit of {self.max_steps} exceeded")

    def exec_block(self, stmts, env: Env, frame: Frame) -> None:
        for s in stmts:
            self.exec_stmt(s, env, frame)

    def exec_stmt(self, s, env: Env, frame: Frame) -> None:
        self._tick()
        t = type(s)
        if t is ast.ExprStmt:
            self.eval(s.expr, env, frame)
        elif t is ast.Let:
            env.vars[s.name] = self.eval(s.value, env, frame)
        elif t is ast.Assign:
            self._assign(s, env, frame)
        elif t is ast.If:
            if _bool(self.eval(s.cond, env, frame), "if condition"):
                self.exec_block(s.then, Env(env), frame)
            elif s.orelse is not None:
                self.exec_block(s.orelse, Env(env), frame)
        elif t is ast.While:
            while _bool(self.eval(s.cond, env, frame), "while condition"):
                self._tick()
                self.exec_block(s.body, Env(env), frame)
        elif t is ast.ForIn:
            for item in self._iterate(self.eval(s.iterable, env, frame)):
                self._tick()
                inner = Env(env)
                inner.vars[s.var] = item
                self.exec_block(s.body, inner, frame)
        elif t is ast.Return:
            raise _Return(None if s.value is None else self.eval(s.value, env, frame))
        elif t is ast.Throw:
            value = self.eval(s.value, env, frame)
            if not isinstance(value, ExcValue):
                throw("TypeError", f"can only throw exceptions, got {typeof(value)}")
            raise Thrown(value)
        elif t is ast.Try:
            try:
                self.exec_block(s.body, Env(env), frame)
            except Thrown as exc:
                inner = Env(env)
                inner.vars[s.var] = exc.value
                self.exec_block(s.handler, inner, frame)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def _iterate(self, v):
        if isinstance(v, MList):
            return list(v.items)
        if isinstance(v, MMap):
            return sorted(v.entries)
        if isinstance(v, str):
            return list(v)
        throw("TypeError", f"cannot iterate over {typeof(v)}")

    def _assign(self, s: ast.Assign, env: Env, frame: Frame) -> None:
        value = self.eval(s.value, env, frame)
        target = s.target
        if isinstance(target, ast.Name):
            env.assign(target.name, value)
            return
        obj = self.eval(target.target, env, frame)
        if not isinstance(obj, Instance):
            throw("TypeError", f"cannot set field {target.name!r} on {typeof(obj)}")
        self._check_field_access(obj, target.name, frame)
        if obj.record and contains_plain_instance(value):
            throw("TypeError", f"record field {target.name!r} cannot hold an object reference")
        obj.fields[target.name] = value

    def _check_field_access(self, obj: Instance, name: str, frame: Frame) -> None:
        if obj.origin == "library" and frame.module.kind != "library":
            throw("TypeError", f"cannot access field {name!r} of library object {obj.class_id}")

    # -- expressions -------------------------------------------------------

    def eval(self, e, env: Env, frame: Frame):
        t = type(e)
        if t is ast.Literal:
            return e.value
        if t is ast.Name:
            return env.lookup(e.name)
        if t is ast.Call:
            args = [self.eval(a, env, frame) for a in e.args]
            return self._call_global(e.name, args, frame, e.pos)
        if t is ast.MethodCall:
            target = self.eval(e.target, env, frame)
            args = [self.eval(a, env, frame) for a in e.args]
            return self._call_method(target, e.method, args, frame, e.pos)
        if t is ast.Binary:
            return self._binary(e, env, frame)
        if t is ast.Unary:
            v = self.eval(e.operand, env, frame)
            if e.op == "!":
                return not _bool(v, "operand of !")
            if isinstance(v, int) and not isinstance(v, bool):
                return _check_int(-v)
            if isinstance(v, float):
                return -v
            throw("TypeError", f"bad operand for unary -: {typeof(v)}")
        if t is ast.Field:
            obj = self.eval(e.target, env, frame)
            if isinstance(obj, ExcValue):
                if e.name == "type":
                    return obj.type
                if e.name == "message":
                    return obj.message
                throw("NameError", f"exception has no field {e.name!r}")
            if not isinstance(obj, Instance):
                throw("TypeError", f"cannot read field {e.name!r} of {typeof(obj)}")
            self._check_field_access(obj, e.name, frame)
            if e.name not in obj.fields:
                throw("NameError", f"{obj.class_name} has no field {e.name!r}")
            return obj.fields[e.name]
        if t is ast.SelfRef:
            if frame.self_obj is None:
                throw("NameError", "'self' outside a method")
            return frame.self_obj
        if t is ast.ListLit:
            return MList([self.eval(x, env, frame) for x in e.items])
        if t is ast.MapLit:
            m = MMap()
            for k_expr, v_expr in e.entries:
                k = self.eval(k_expr, env, frame)
                if not isinstance(k, str):
                    throw("TypeError", f"map keys must be str, got {typeof(k)}")
                m.entries[k] = self.eval(v_expr, env, frame)
            return m
        raise TypeError(f"unknown expression {e!r}")

    def _binary(self, e: ast.Binary, env: Env, frame: Frame):
        op = e.op
        if op == "&&":
            return _bool(self.eval(e.left, env, frame), "operand of &&") and _bool(
                self.eval(e.right, env, frame), "operand of &&"
            )
        if op == "||":
            return _bool(self.eval(e.left, env, frame), "operand of ||") or _bool(
                self.eval(e.right, env, frame), "operand of ||"
            )
        a = self.eval(e.left, env, frame)
        b = self.eval(e.right, env, frame)
        if op == "==":
            return equals(a, b)
        if op == "!=":
            return not equals(a, b)
        if op in ("<", "<=", ">", ">="):
            return _compare(op, a, b)
        return _arith(op, a, b)

    # -- calls ---------------------------------------------------------------

    def _is_boundary(self, caller: Frame, callee: ast.Module, exported: bool) -> bool:
        if callee.kind != "library":
            return False
        if caller.module.kind != "library":
            return True
        return self.record_internal and exported

    def _call_global(self, name: str, args: list, frame: Frame, pos):
        self._tick()
        builtin = BUILTINS.get(name)
        if builtin is None and frame.module.kind == "test":
            builtin = TEST_ONLY_BUILTINS.get(name)
        if builtin is not None:
            if len(args) != _ARITY[name]:
                throw("ArityError", f"{name} expects {_ARITY[name]} argument(s), got {len(args)}")
            return builtin(self, *args)
        entry = self.project.globals.get(name)
        if entry is None:
            throw("NameError", f"undefined function {name!r}")
        mod, decl = entry
        if isinstance(decl, ast.FnDecl):
            run = lambda: self._invoke(decl, mod, None, args)  # noqa: E731
            if self._is_boundary(frame, mod, decl.exported):
                return self._through_probe(f"{mod.name}::{name}", None, args, run)
            return run()
        run = lambda: self._construct(decl, mod, args)  # noqa: E731
        if self._is_boundary(frame, mod, decl.exported):
            return self._through_probe(f"{mod.name}::{name}#init", None, args, run)
        return run()

    def _construct(self, decl: ast.ClassDecl, mod: ast.Module, args: list) -> Instance:
        obj = Instance(f"{mod.name}::{decl.name}", mod.kind, decl.record)
        init = decl.method("init")
        if init is None:
            if args:
                throw("ArityError", f"{decl.name}() takes no arguments, got {len(args)}")
        else:
            self._invoke(init, mod, obj, args)
        return obj

    def _call_method(self, target, name: str, args: list, frame: Frame, pos):
        self._tick()
        if not isinstance(target, Instance):
            throw("TypeError", f"cannot call method {name!r} on {typeof(target)}")
        mod, decl = self.project.classes[target.class_id]
        method = decl.method(name)
        if method is None:
            throw("TypeError", f"{decl.name} has no method {name!r}")
        run = lambda: self._invoke(method, mod, target, args)  # noqa: E731
        if self._is_boundary(frame, mod, decl.exported):
            return self._through_probe(f"{target.class_id}#{name}", target, args, run)
        return run()

    def _invoke(self, fn: ast.FnDecl, mod: ast.Module, self_obj, args: list):
        if len(args) != len(fn.params):
            throw("ArityError", f"{fn.name} expects {len(fn.params)} argument(s), got {len(args)}")
        if self.depth >= self.max_depth:
            raise ExecutionLimit(f"call depth limit of {self.max_depth} exceeded")
        env = Env()
        env.vars.update(zip(fn.params, args))
        self.depth += 1
        try:
            self.exec_block(fn.body, env, Frame(mod, self_obj))
        except _Return as ret:
            return ret.value
        finally:
            self.depth -= 1
        return None

    def _through_probe(self, method: str, receiver, args: list, run):
        if self.probe is None:
            return run()
        try:
            token = self.probe.on_boundary_call(method, receiver, args)
        except Abort:
            raise
        except Exception as exc:
            raise ProbeFailure(f"{method}: {exc}") from exc
        try:
            result = run()
        except Thrown as exc:
            self._probe_return(token, None, exc.value)
            raise
        self._probe_return(token, result, None)
        return result

    def _probe_return(self, token, result, exception) -> None:
        try:
            self.probe.on_boundary_return(token, result=result, exception=exception)
        except Abort:
            raise
        except Exception as exc:
            raise ProbeFailure(str(exc)) from exc


def run_test(project: Project, test_id: str, probe=None, record_internal: bool = False) -> TestOutcome:
    return Interpreter(project, probe, record_internal).run_test(test_id)


def run_all_tests(project: Project, probe_factory=None, record_internal: bool = False) -> list[TestOutcome]:
    """Run every test in file-path order, then textual order within a file."""
    outcomes = []
    for ref in project.tests():
        probe = probe_factory(ref.test_id) if probe_factory is not None else None
        outcomes.append(run_test(project, ref.test_id, probe, record_internal))
    return outcomes


__all__ = ["Interpreter", "TestOutcome", "run_test", "run_all_tests", "display", "equals"]
