"""Canonical pretty-printer: 4-space indent, one declaration per line,
stereotypes emitted in ASCII `<<...>>` form. Printing is a fixpoint of the
parser: parse(print(m)) == m for every parser-produced model."""

from __future__ import annotations

from decimal import Decimal

from . import model as m

_INDENT = "    "

# precedence levels, higher binds tighter
_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5,
}
_UNARY_PREC = 6
_ATOM_PREC = 7


def _escape(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def format_expr(e: m.Expr) -> str:
    return _expr(e)[0]


def _expr(e: m.Expr) -> tuple[str, int]:
    """Render an expression, returning (text, precedence of its top node)."""
    if isinstance(e, m.IntLit):
        return str(e.value), _ATOM_PREC
    if isinstance(e, m.RealLit):
        text = repr(e.value)
        if "e" in text or "E" in text:
            # real literals have no exponent form; expand exactly
            text = format(Decimal(e.value), "f")
        if "." not in text:
            text += ".0"
        return text, _ATOM_PREC
    if isinstance(e, m.BoolLit):
        return ("true" if e.value else "false"), _ATOM_PREC
    if isinstance(e, m.TextLit):
        return _escape(e.value), _ATOM_PREC
    if isinstance(e, m.NullLit):
        return "null", _ATOM_PREC
    if isinstance(e, m.SelfRef):
        return "self", _ATOM_PREC
    if isinstance(e, m.NameRef):
        return e.name, _ATOM_PREC
    if isinstance(e, m.SlotRead):
        obj, prec = _expr(e.obj)
        if prec < _ATOM_PREC:
            obj = f"({obj})"
        return f"{obj}.{e.slot}", _ATOM_PREC
    if isinstance(e, m.Unary):
        operand, prec = _expr(e.operand)
        if prec < _UNARY_PREC:
            operand = f"({operand})"
        elif e.op == "-" and operand.startswith("-"):
            operand = f"({operand})"  # avoid lexing '--'
        return f"{e.op}{operand}", _UNARY_PREC
    if isinstance(e, m.Binary):
        my_prec = _PREC[e.op]
        left, lp = _expr(e.left)
        right, rp = _expr(e.right)
        if lp < my_prec:
            left = f"({left})"
        # left-associative chain: parenthesise right at equal precedence;
        # comparisons do not chain, so equal precedence is parenthesised too
        if rp <= my_prec:
            right = f"({right})"
        return f"{left} {e.op} {right}", my_prec
    if isinstance(e, m.RandCall):
        return "rand()", _ATOM_PREC
    if isinstance(e, m.LenCall):
        return f"len({format_expr(e.arg)})", _ATOM_PREC
    if isinstance(e, m.NewExpr):
        fields = ", ".join(f"{n}: {format_expr(v)}" for n, v in e.fields)
        return f"new {e.class_name}({fields})", _ATOM_PREC
    if isinstance(e, m.SendExpr):
        recv, prec = _expr(e.receiver)
        if prec < _ATOM_PREC:
            recv = f"({recv})"
        args = ", ".join(format_expr(a) for a in e.args)
        return f"send {recv}.{e.op}({args})", _ATOM_PREC
    raise TypeError(f"unknown expression node: {e!r}")


def _stmt(s: m.Statement, depth: int, out: list[str]) -> None:
    pad = _INDENT * depth
    if isinstance(s, m.LetStmt):
        out.append(f"{pad}let {s.name} := {format_expr(s.value)};")
    elif isinstance(s, m.AssignStmt):
        target, prec = _expr(s.target)
        if prec < _ATOM_PREC:
            target = f"({target})"
        out.append(f"{pad}{target}.{s.slot} := {format_expr(s.value)};")
    elif isinstance(s, m.SendStmt):
        out.append(f"{pad}{format_expr(s.send)};")
    elif isinstance(s, m.IfStmt):
        _if_chain(s, depth, out, pad + "if")
    elif isinstance(s, m.ForeachStmt):
        out.append(f"{pad}foreach {s.var} in {format_expr(s.list_expr)} {{")
        for inner in s.body:
            _stmt(inner, depth + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, m.PushStmt):
        out.append(f"{pad}push({format_expr(s.list_expr)}, {format_expr(s.value)});")
    elif isinstance(s, m.PopFrontStmt):
        out.append(f"{pad}popFront({format_expr(s.list_expr)});")
    elif isinstance(s, m.ReturnStmt):
        if s.value is None:
            out.append(f"{pad}return;")
        else:
            out.append(f"{pad}return {format_expr(s.value)};")
    else:
        raise TypeError(f"unknown statement node: {s!r}")


def _if_chain(s: m.IfStmt, depth: int, out: list[str], opener: str) -> None:
    pad = _INDENT * depth
    out.append(f"{opener} {format_expr(s.cond)} {{")
    for inner in s.then_body:
        _stmt(inner, depth + 1, out)
    if not s.else_body:
        out.append(f"{pad}}}")
    elif len(s.else_body) == 1 and isinstance(s.else_body[0], m.IfStmt):
        _if_chain(s.else_body[0], depth, out, f"{pad}}} else if")
    else:
        out.append(f"{pad}}} else {{")
        for inner in s.else_body:
            _stmt(inner, depth + 1, out)
        out.append(f"{pad}}}")


def print_model(model: m.Model) -> str:
    """Render a model in canonical form; deterministic byte-for-byte."""
    out: list[str] = [f"model {model.name} {{"]
    for c in model.classes:
        out.append("")
        head = "    abstract class" if c.abstract else "    class"
        head += f" {c.name} <<{c.stereotype}>>"
        if c.extends:
            head += f" extends {c.extends}"
        if c.concept is not None:
            head += f" concept {_escape(c.concept)}"
        out.append(head + " {")
        for a in c.attrs:
            line = f"{_INDENT * 2}attr {a.name} <<{a.stereotype}>>"
            if a.concept is not None:
                line += f" concept {_escape(a.concept)}"
            line += f" : {a.type};"
            out.append(line)
        for op in c.ops:
            line = f"{_INDENT * 2}op {op.name} <<{op.stereotype}>>"
            if op.concept is not None:
                line += f" concept {_escape(op.concept)}"
            if op.params:
                params = ", ".join(f"{p.name}: {p.type}" for p in op.params)
                line += f" ({params})"
            if op.return_type is not None:
                line += f" : {op.return_type}"
            out.append(line + " {")
            for s in op.body:
                _stmt(s, 3, out)
            out.append(f"{_INDENT * 2}}}")
        out.append("    }")
    for a in model.associations:
        out.append("")
        out.append(
            f"    assoc {a.name} <<{a.stereotype}>> {a.end_a} -- {a.end_b};"
        )
    out.append("}")
    return "\n".join(out) + "\n"
