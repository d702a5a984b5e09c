"""Pretty printer; its output parses back to a structurally equal tree."""

from __future__ import annotations

from . import ast

_INDENT = "    "


def quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\0":
            out.append("\\0")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def format_literal(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return quote(value)
    raise TypeError(f"not a literal: {value!r}")


def expr_to_str(e) -> str:
    if isinstance(e, ast.Literal):
        return format_literal(e.value)
    if isinstance(e, ast.ListLit):
        return "[" + ", ".join(expr_to_str(x) for x in e.items) + "]"
    if isinstance(e, ast.MapLit):
        return "{" + ", ".join(f"{expr_to_str(k)}: {expr_to_str(v)}" for k, v in e.entries) + "}"
    if isinstance(e, ast.Name):
        return e.name
    if isinstance(e, ast.SelfRef):
        return "self"
    if isinstance(e, ast.Call):
        return f"{e.name}({', '.join(expr_to_str(a) for a in e.args)})"
    if isinstance(e, ast.MethodCall):
        return f"{_postfix_operand(e.target)}.{e.method}({', '.join(expr_to_str(a) for a in e.args)})"
    if isinstance(e, ast.Field):
        return f"{_postfix_operand(e.target)}.{e.name}"
    if isinstance(e, ast.Unary):
        return f"({e.op}{expr_to_str(e.operand)})"
    if isinstance(e, ast.Binary):
        return f"({expr_to_str(e.left)} {e.op} {expr_to_str(e.right)})"
    raise TypeError(f"not an expression: {e!r}")


def _postfix_operand(e) -> str:
    text = expr_to_str(e)
    if isinstance(e, ast.Literal) and isinstance(e.value, (int, float)) and not isinstance(e.value, bool):
        return f"({text})"
    return text


def _block(stmts, depth: int) -> list[str]:
    lines = []
    for s in stmts:
        lines.extend(_stmt(s, depth))
    return lines


def _stmt(s, depth: int) -> list[str]:
    pad = _INDENT * depth
    if isinstance(s, ast.Let):
        return [f"{pad}let {s.name} = {expr_to_str(s.value)};"]
    if isinstance(s, ast.Assign):
        return [f"{pad}{expr_to_str(s.target)} = {expr_to_str(s.value)};"]
    if isinstance(s, ast.ExprStmt):
        return [f"{pad}{expr_to_str(s.expr)};"]
    if isinstance(s, ast.Return):
        return [f"{pad}return;" if s.value is None else f"{pad}return {expr_to_str(s.value)};"]
    if isinstance(s, ast.Throw):
        return [f"{pad}throw {expr_to_str(s.value)};"]
    if isinstance(s, ast.While):
        return [f"{pad}while {expr_to_str(s.cond)} {{", *_block(s.body, depth + 1), f"{pad}}}"]
    if isinstance(s, ast.ForIn):
        return [f"{pad}for {s.var} in {expr_to_str(s.iterable)} {{", *_block(s.body, depth + 1), f"{pad}}}"]
    if isinstance(s, ast.Try):
        return [
            f"{pad}try {{",
            *_block(s.body, depth + 1),
            f"{pad}}} catch {s.var} {{",
            *_block(s.handler, depth + 1),
            f"{pad}}}",
        ]
    if isinstance(s, ast.If):
        lines = [f"{pad}if {expr_to_str(s.cond)} {{", *_block(s.then, depth + 1)]
        if s.orelse is None:
            lines.append(f"{pad}}}")
        else:
            lines.append(f"{pad}}} else {{")
            lines.extend(_block(s.orelse, depth + 1))
            lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"not a statement: {s!r}")


def _params(params) -> str:
    return "(" + ", ".join(params) + ")"


def decl_to_lines(d) -> list[str]:
    if isinstance(d, ast.FnDecl):
        prefix = "export " if d.exported else ""
        return [f"{prefix}fn {d.name}{_params(d.params)} {{", *_block(d.body, 1), "}"]
    if isinstance(d, ast.ClassDecl):
        prefix = ("export " if d.exported else "") + ("record " if d.record else "")
        lines = [f"{prefix}class {d.name} {{"]
        for m in d.methods:
            lines.append(f"{_INDENT}{m.name}{_params(m.params)} {{")
            lines.extend(_block(m.body, 2))
            lines.append(f"{_INDENT}}}")
        lines.append("}")
        return lines
    if isinstance(d, ast.TestDecl):
        return [f"test {quote(d.name)} {{", *_block(d.body, 1), "}"]
    raise TypeError(f"not a declaration: {d!r}")


def pretty_print(module: ast.Module) -> str:
    chunks = ["\n".join(decl_to_lines(d)) for d in module.declarations]
    return "\n\n".join(chunks) + ("\n" if chunks else "")
