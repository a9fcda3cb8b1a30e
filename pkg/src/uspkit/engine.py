"""Deterministic tick engine.

A validated model is compiled once into per-class slot tables and closure
trees for operation bodies, then executed: one tick = one engine-initiated
invocation of the boundary's «Exist» operation, with every message
dispatched synchronously and depth-first. Each message appends exactly one
trace event; the canonical trace serialization is JSON Lines with fields in
fixed order, and the trace hash is SHA-256 over exactly those bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Callable

from . import model as m
from .diagnostics import Diagnostic, Severity, Span
from .model import TypeKind
from .rng import SplitMix64
from .stereotypes import Stereotype
from .validator import ValidatedModel

_INT_MIN = -(2 ** 63)
_INT_MAX = 2 ** 63 - 1


class UspRuntimeError(Exception):
    """A runtime failure; names the statement span and the trace seq at
    which the run aborted."""

    def __init__(self, rule_id: str, message: str, span: Span, seq: int):
        super().__init__(f"{span}: error[{rule_id}]: {message} (at trace seq {seq})")
        self.diagnostic = Diagnostic(rule_id, Severity.ERROR, message, span)
        self.seq = seq


@dataclass(frozen=True)
class RunLimits:
    max_call_depth: int = 64
    max_messages_per_tick: int = 1_000_000


class EntityInstance:
    """A live object: identity, concrete class, and its slot map."""

    __slots__ = ("id", "cls", "slots")

    def __init__(self, ident: str, cls: "_CompiledClass", slots: dict[str, Any]):
        self.id = ident
        self.cls = cls
        self.slots = slots

    def __repr__(self) -> str:
        return f"<{self.id}>"


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    seq: int
    sender: str
    receiver: str
    op: str
    args: tuple

    def to_json_line(self) -> str:
        return (
            f'{{"tick":{self.tick},"seq":{self.seq},"sender":"{self.sender}",'
            f'"receiver":"{self.receiver}","op":"{self.op}",'
            f'"args":{_render_args(self.args)}}}'
        )


@dataclass
class Trace:
    """Trace of one run. `events` is populated only when event collection
    was requested; the hash is always the SHA-256 of the canonical lines."""

    hash_hex: str | None
    events: list[TraceEvent] | None


@dataclass
class RunStats:
    ticks: int
    seed: int
    message_counts: dict[str, int]
    probe_series: dict[str, list[int]]

    @property
    def total_messages(self) -> int:
        return sum(self.message_counts.values())

    def probe_aggregates(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for name, series in self.probe_series.items():
            if series:
                out[name] = {
                    "mean": sum(series) / len(series),
                    "max": float(max(series)),
                }
            else:
                out[name] = {"mean": 0.0, "max": 0.0}
        return out

    def to_json(self, trace_hash: str | None = None) -> str:
        doc = {
            "ticks": self.ticks,
            "seed": self.seed,
            "total_messages": self.total_messages,
            "message_counts": self.message_counts,
            "probe_aggregates": self.probe_aggregates(),
            "probe_series": self.probe_series,
        }
        if trace_hash is not None:
            doc["trace_hash"] = trace_hash
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@dataclass
class RunResult:
    trace: Trace
    stats: RunStats


# --------------------------------------------------------------------------
# value rendering (canonical trace serialization)
# --------------------------------------------------------------------------

def _render_value(v: Any) -> Any:
    if isinstance(v, EntityInstance):
        return v.id
    if isinstance(v, list):
        return [_render_value(x) for x in v]
    return v


def _json_value(v: Any) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    t = type(v)
    if t is EntityInstance:
        return '"' + v.id + '"'
    if t is int:
        return str(v)
    if t is float:
        return repr(v)
    if t is str:
        return json.dumps(v)
    if t is list:
        return "[" + ",".join(_json_value(x) for x in v) + "]"
    return json.dumps(str(v))


def _render_args(args: tuple) -> str:
    return "[" + ",".join(_json_value(v) for v in args) + "]"


# --------------------------------------------------------------------------
# compilation
# --------------------------------------------------------------------------

class _CompiledOp:
    __slots__ = ("name", "params", "body", "span", "stereotype")

    def __init__(self, op: m.OpDef, body: Callable):
        self.name = op.name
        self.params = tuple(p.name for p in op.params)
        self.body = body
        self.span = op.source_span
        self.stereotype = op.stereotype


class _CompiledClass:
    __slots__ = (
        "name", "cls_def", "abstract", "base_slots", "list_slots",
        "checkers", "ops", "attr_map",
    )

    def __init__(self, cls_def: m.ClassDef):
        self.name = cls_def.name
        self.cls_def = cls_def
        self.abstract = cls_def.abstract
        self.base_slots: dict[str, Any] = {}
        self.list_slots: tuple[str, ...] = ()
        self.checkers: dict[str, Callable[[Any], bool]] = {}
        self.ops: dict[str, _CompiledOp] = {}
        self.attr_map: dict[str, m.AttrDef] = {}


_DEFAULTS = {
    TypeKind.INT: 0,
    TypeKind.REAL: 0.0,
    TypeKind.BOOL: False,
    TypeKind.TEXT: "",
    TypeKind.ENTITY: None,
}


def _make_checker(t: m.TypeRef, descendants: dict[str, frozenset[str]]):
    kind = t.kind
    if kind is TypeKind.INT:
        return lambda v: type(v) is int and _INT_MIN <= v <= _INT_MAX
    if kind is TypeKind.REAL:
        return lambda v: type(v) is float
    if kind is TypeKind.BOOL:
        return lambda v: type(v) is bool
    if kind is TypeKind.TEXT:
        return lambda v: type(v) is str
    if kind is TypeKind.ENTITY:
        allowed = descendants[t.class_name]
        return lambda v: v is None or (
            type(v) is EntityInstance and v.cls.name in allowed
        )
    return lambda v: type(v) is list


class _Compiler:
    def __init__(self, vm: ValidatedModel):
        self.vm = vm
        self.classes: dict[str, _CompiledClass] = {}
        # class name -> names of it and all its subclasses
        self.descendants: dict[str, frozenset[str]] = {}
        for name in vm.classes:
            subs = {name}
            for other, chain in vm.ancestors.items():
                if name in chain:
                    subs.add(other)
            self.descendants[name] = frozenset(subs)
        for name, cls_def in vm.classes.items():
            self.classes[name] = _CompiledClass(cls_def)
        for name, cc in self.classes.items():
            lists = []
            for a in vm.attr_table[name]:
                cc.attr_map[a.name] = a
                cc.checkers[a.name] = _make_checker(a.type, self.descendants)
                if a.type.kind is TypeKind.ENTITY_LIST:
                    lists.append(a.name)
                else:
                    cc.base_slots[a.name] = _DEFAULTS[a.type.kind]
            cc.list_slots = tuple(lists)
        compiled_ops: dict[int, _CompiledOp] = {}
        for name, ops in vm.op_table.items():
            for op_name, op_def in ops.items():
                cop = compiled_ops.get(id(op_def))
                if cop is None:
                    cop = _CompiledOp(op_def, self.compile_block(op_def.body))
                    compiled_ops[id(op_def)] = cop
                self.classes[name].ops[op_name] = cop

    # ---- statements ----

    def compile_block(self, body: tuple[m.Statement, ...]) -> Callable:
        closures = [self.compile_stmt(s) for s in body]
        if not closures:
            return lambda env: None
        if len(closures) == 1:
            return closures[0]
        def run(env, _cs=tuple(closures)):
            for c in _cs:
                r = c(env)
                if r is not None:
                    return r
            return None
        return run

    def compile_stmt(self, s: m.Statement) -> Callable:
        if isinstance(s, m.LetStmt):
            val_c = self.compile_expr(s.value)
            name = s.name
            def run(env):
                env[name] = val_c(env)
                return None
            return run
        if isinstance(s, m.AssignStmt):
            return self.compile_assign(s)
        if isinstance(s, m.SendStmt):
            send_c = self.compile_expr(s.send)
            def run(env):
                send_c(env)
                return None
            return run
        if isinstance(s, m.IfStmt):
            cond_c = self.compile_expr(s.cond)
            then_c = self.compile_block(s.then_body)
            if not s.else_body:
                def run(env):
                    if cond_c(env):
                        return then_c(env)
                    return None
                return run
            else_c = self.compile_block(s.else_body)
            def run(env):
                if cond_c(env):
                    return then_c(env)
                return else_c(env)
            return run
        if isinstance(s, m.ForeachStmt):
            lst_c = self.compile_expr(s.list_expr)
            body_c = self.compile_block(s.body)
            var = s.var
            def run(env):
                for item in tuple(lst_c(env)):  # snapshot at loop entry
                    env[var] = item
                    r = body_c(env)
                    if r is not None:
                        return r
                return None
            return run
        if isinstance(s, m.PushStmt):
            lst_c = self.compile_expr(s.list_expr)
            val_c = self.compile_expr(s.value)
            elem_t = self.vm.expr_types[id(s.list_expr)]
            checker = _make_checker(
                m.entity(elem_t.class_name), self.descendants
            )
            span = s.span
            def run(env):
                v = val_c(env)
                if v is None or not checker(v):
                    _type_error(env, span, "pushed value does not fit the list element type")
                lst_c(env).append(v)
                return None
            return run
        if isinstance(s, m.PopFrontStmt):
            lst_c = self.compile_expr(s.list_expr)
            span = s.span
            def run(env):
                lst = lst_c(env)
                if not lst:
                    raise UspRuntimeError(
                        "R005", "popFront on empty list", span, env["@eng"].seq
                    )
                lst.pop(0)
                return None
            return run
        if isinstance(s, m.ReturnStmt):
            if s.value is None:
                return lambda env: (None,)
            val_c = self.compile_expr(s.value)
            return lambda env: (val_c(env),)
        raise TypeError(f"unknown statement node: {s!r}")

    def compile_assign(self, s: m.AssignStmt) -> Callable:
        obj_c = self.compile_expr(s.target)
        val_c = self.compile_expr(s.value)
        slot = s.slot
        span = s.span
        target_t = self.vm.expr_types[id(s.target)]
        checker = self.classes[target_t.class_name].checkers[slot]
        if isinstance(s.target, m.SelfRef):
            def run(env):
                v = val_c(env)
                if not checker(v):
                    _type_error(env, span, f"value does not fit slot '{slot}'")
                env["@self"].slots[slot] = v
                return None
            return run
        def run(env):
            o = obj_c(env)
            v = val_c(env)
            if o is None:
                _null_deref(env, span, slot)
            if not checker(v):
                _type_error(env, span, f"value does not fit slot '{slot}'")
            o.slots[slot] = v
            return None
        return run

    # ---- expressions ----

    def compile_expr(self, e: m.Expr) -> Callable:
        if isinstance(e, m.SlotRead):
            slot = e.slot
            span = e.span
            if isinstance(e.obj, m.SelfRef):
                def run(env):
                    return env["@self"].slots[slot]
                return run
            obj_c = self.compile_expr(e.obj)
            def run(env):
                o = obj_c(env)
                if o is None:
                    _null_deref(env, span, slot)
                return o.slots[slot]
            return run
        if isinstance(e, m.NameRef):
            name = e.name
            return lambda env: env[name]
        if isinstance(e, m.SelfRef):
            return lambda env: env["@self"]
        if isinstance(e, (m.IntLit, m.RealLit, m.BoolLit, m.TextLit)):
            v = e.value
            return lambda env: v
        if isinstance(e, m.NullLit):
            return lambda env: None
        if isinstance(e, m.Binary):
            return self.compile_binary(e)
        if isinstance(e, m.Unary):
            operand_c = self.compile_expr(e.operand)
            if e.op == "!":
                return lambda env: not operand_c(env)
            return lambda env: -operand_c(env)
        if isinstance(e, m.RandCall):
            return lambda env: env["@eng"].rng.next_float()
        if isinstance(e, m.LenCall):
            arg_c = self.compile_expr(e.arg)
            return lambda env: len(arg_c(env))
        if isinstance(e, m.NewExpr):
            return self.compile_new(e)
        if isinstance(e, m.SendExpr):
            return self.compile_send(e)
        raise TypeError(f"unknown expression node: {e!r}")

    def compile_binary(self, e: m.Binary) -> Callable:
        left_c = self.compile_expr(e.left)
        right_c = self.compile_expr(e.right)
        op = e.op
        if op == "&&":
            return lambda env: left_c(env) and right_c(env)
        if op == "||":
            return lambda env: left_c(env) or right_c(env)
        if op == "/":
            span = e.span
            lt = self.vm.expr_types[id(e.left)]
            rt = self.vm.expr_types[id(e.right)]
            if lt.kind is TypeKind.INT and rt.kind is TypeKind.INT:
                def run(env):
                    l = left_c(env)
                    r = right_c(env)
                    if r == 0:
                        raise UspRuntimeError(
                            "R003", "division by zero", span, env["@eng"].seq
                        )
                    q, rem = divmod(l, r)
                    if rem:
                        raise UspRuntimeError(
                            "R002",
                            f"Int division {l} / {r} leaves a remainder; use Real",
                            span,
                            env["@eng"].seq,
                        )
                    return q
                return run
            def run(env):
                l = left_c(env)
                r = right_c(env)
                if r == 0:
                    raise UspRuntimeError(
                        "R003", "division by zero", span, env["@eng"].seq
                    )
                return l / r
            return run
        table: dict[str, Callable] = {
            "+": lambda env: left_c(env) + right_c(env),
            "-": lambda env: left_c(env) - right_c(env),
            "*": lambda env: left_c(env) * right_c(env),
            "==": lambda env: left_c(env) == right_c(env),
            "!=": lambda env: left_c(env) != right_c(env),
            "<": lambda env: left_c(env) < right_c(env),
            "<=": lambda env: left_c(env) <= right_c(env),
            ">": lambda env: left_c(env) > right_c(env),
            ">=": lambda env: left_c(env) >= right_c(env),
        }
        return table[op]

    def compile_new(self, e: m.NewExpr) -> Callable:
        ccls = self.classes[e.class_name]
        span = e.span
        if ccls.abstract:
            # SP010 is caught statically; this guards direct engine misuse
            def run(env):
                raise UspRuntimeError(
                    "R009",
                    f"cannot instantiate abstract class '{ccls.name}'",
                    span,
                    env["@eng"].seq,
                )
            return run
        setters = []
        for name, value in e.fields:
            setters.append((name, self.compile_expr(value), ccls.checkers[name]))
        def run(env):
            eng = env["@eng"]
            ent = eng.create_entity(ccls)
            for name, val_c, checker in setters:
                v = val_c(env)
                if not checker(v):
                    _type_error(env, span, f"value does not fit slot '{name}'")
                ent.slots[name] = v
            return ent
        return run

    def compile_send(self, e: m.SendExpr) -> Callable:
        recv_c = self.compile_expr(e.receiver)
        arg_cs = tuple(self.compile_expr(a) for a in e.args)
        op_name = e.op
        span = e.span
        if not arg_cs:
            def run(env):
                recv = recv_c(env)
                if recv is None:
                    _null_deref(env, span, op_name)
                return env["@eng"].dispatch(env["@self"], recv, op_name, (), span)
            return run
        def run(env):
            recv = recv_c(env)
            if recv is None:
                _null_deref(env, span, op_name)
            args = tuple(c(env) for c in arg_cs)
            return env["@eng"].dispatch(env["@self"], recv, op_name, args, span)
        return run


def _null_deref(env, span: Span, name: str):
    raise UspRuntimeError(
        "R001",
        f"null dereference while accessing '{name}'",
        span,
        env["@eng"].seq,
    )


def _type_error(env, span: Span, message: str):
    raise UspRuntimeError("R007", message, span, env["@eng"].seq)


# --------------------------------------------------------------------------
# probes
# --------------------------------------------------------------------------

def _compile_probe(
    name: str, root_cc: _CompiledClass, classes: dict[str, _CompiledClass]
) -> Callable[["RunState"], int]:
    span = root_cc.cls_def.source_span
    if name == "queue_length":
        head = root_cc.attr_map.get("head")
        if head is None or head.type.kind is not TypeKind.ENTITY:
            raise UspRuntimeError(
                "R010",
                f"queue_length probe needs a «ref» slot 'head' on '{root_cc.name}'",
                span, 0,
            )
        link_cc = classes[head.type.class_name]
        next_slots = [
            a.name
            for a in link_cc.attr_map.values()
            if a.type.kind is TypeKind.ENTITY
            and a.type.class_name == link_cc.name
        ]
        if len(next_slots) != 1:
            raise UspRuntimeError(
                "R010",
                f"queue_length probe needs exactly one self-typed «ref» slot on "
                f"'{link_cc.name}'",
                span, 0,
            )
        next_slot = next_slots[0]
        def sample(state: "RunState") -> int:
            n = 0
            node = state.root.slots["head"]
            cap = state.entities_created + 1
            while node is not None:
                n += 1
                if n > cap:
                    raise UspRuntimeError(
                        "R010", "queue chain contains a cycle", span, state.seq
                    )
                node = node.slots[next_slot]
            return n
        return sample

    segments = name.split(".")
    cc = root_cc
    for i, seg in enumerate(segments):
        attr = cc.attr_map.get(seg)
        if attr is None:
            raise UspRuntimeError(
                "R010", f"probe path '{name}': '{cc.name}' has no slot '{seg}'",
                span, 0,
            )
        last = i == len(segments) - 1
        if last:
            if attr.type.kind not in (TypeKind.INT, TypeKind.BOOL):
                raise UspRuntimeError(
                    "R010",
                    f"probe '{name}' must be integer-valued (slot type {attr.type})",
                    span, 0,
                )
        else:
            if attr.type.kind is not TypeKind.ENTITY:
                raise UspRuntimeError(
                    "R010",
                    f"probe path '{name}': '{seg}' is not an entity slot",
                    span, 0,
                )
            cc = classes[attr.type.class_name]
    segs = tuple(segments)
    def sample(state: "RunState") -> int:
        obj = state.root
        for seg in segs[:-1]:
            obj = obj.slots[seg]
            if obj is None:
                raise UspRuntimeError(
                    "R010", f"probe path '{name}' hit null at '{seg}'",
                    span, state.seq,
                )
        return int(obj.slots[segs[-1]])
    return sample


# --------------------------------------------------------------------------
# run state
# --------------------------------------------------------------------------

class RunState:
    """Mutable state of one run; strictly single-threaded."""

    def __init__(
        self,
        vm: ValidatedModel,
        root_class: str,
        seed: int,
        *,
        overrides: dict[str, Any] | None = None,
        probes: tuple[str, ...] = (),
        limits: RunLimits | None = None,
        trace_file: BinaryIO | None = None,
        hash_trace: bool = True,
        collect_events: bool = False,
    ):
        self.vm = vm
        self.limits = limits or RunLimits()
        self.seed = seed
        self.rng = SplitMix64(seed)
        self.tick = 0
        self.seq = 0
        self.depth = 0
        self.msgs_this_tick = 0
        self.entities_created = 0
        self.halted = False
        self.message_counts: dict[str, int] = {}
        self._trace_file = trace_file
        self._hasher = hashlib.sha256() if hash_trace else None
        self.events: list[TraceEvent] | None = [] if collect_events else None
        self._tracing = (
            self._hasher is not None
            or trace_file is not None
            or self.events is not None
        )

        compiler = _Compiler(vm)
        self.classes = compiler.classes

        root_cc = self.classes.get(root_class)
        no_span = vm.model.source_span
        if root_cc is None:
            raise UspRuntimeError(
                "R009", f"unknown root class '{root_class}'", no_span, 0
            )
        if root_cc.abstract:
            raise UspRuntimeError(
                "R009", f"root class '{root_class}' is abstract", no_span, 0
            )
        if not m.is_frame(root_cc.cls_def):
            raise UspRuntimeError(
                "R009", f"root class '{root_class}' is not a frame class", no_span, 0
            )
        boundary_cc = self.classes[vm.boundary.name]
        if boundary_cc.abstract:
            raise UspRuntimeError(
                "R009",
                f"boundary class '{boundary_cc.name}' is abstract",
                no_span, 0,
            )

        exist_ops = [
            op for op in boundary_cc.ops.values()
            if op.stereotype is Stereotype.EXIST
        ]
        self._exist_op = exist_ops[0].name

        self.boundary = self.create_entity(boundary_cc)
        self.root = (
            self.boundary
            if root_class == vm.boundary.name
            else self.create_entity(root_cc)
        )

        self._wire(self.boundary)
        if self.root is not self.boundary:
            self._wire(self.root)

        init_op = boundary_cc.ops.get("init")
        if (
            init_op is not None
            and init_op.stereotype is Stereotype.RULE
            and not init_op.params
        ):
            self.dispatch(None, self.boundary, "init", (), init_op.span)

        if overrides:
            self._apply_overrides(overrides)

        self.probe_samplers = [
            (p, _compile_probe(p, root_cc, self.classes)) for p in probes
        ]
        self.probe_series: dict[str, list[int]] = {p: [] for p in probes}
        self._sample_probes()

    # ---- plumbing ----

    def create_entity(self, ccls: _CompiledClass) -> EntityInstance:
        idx = self.entities_created
        self.entities_created = idx + 1
        slots = dict(ccls.base_slots)
        for name in ccls.list_slots:
            slots[name] = []
        return EntityInstance(f"{ccls.name}#{idx}", ccls, slots)

    def _wire(self, inst: EntityInstance) -> None:
        """Point «ref» slots that can hold the counterpart instance at it."""
        other = self.root if inst is self.boundary else self.boundary
        ok_names = {other.cls.name, *self.vm.ancestors[other.cls.name]}
        for attr in self.vm.attr_table[inst.cls.name]:
            if (
                attr.stereotype is Stereotype.REF
                and attr.type.kind is TypeKind.ENTITY
                and attr.type.class_name in ok_names
            ):
                inst.slots[attr.name] = other

    def _apply_overrides(self, overrides: dict[str, Any]) -> None:
        cc = self.boundary.cls
        for name, value in overrides.items():
            attr = cc.attr_map.get(name)
            span = self.vm.boundary.source_span
            if attr is None:
                raise UspRuntimeError(
                    "R011",
                    f"override targets unknown slot '{name}' on boundary "
                    f"'{cc.name}'",
                    span, self.seq,
                )
            if attr.type.kind is TypeKind.REAL and type(value) is int:
                value = float(value)
            if not cc.checkers[name](value):
                raise UspRuntimeError(
                    "R011",
                    f"override value for '{name}' does not fit type {attr.type}",
                    span, self.seq,
                )
            self.boundary.slots[name] = value

    def dispatch(
        self,
        sender: EntityInstance | None,
        receiver: EntityInstance,
        op_name: str,
        args: tuple,
        span: Span,
    ):
        cop = receiver.cls.ops[op_name]
        self.seq = seq = self.seq + 1
        self.msgs_this_tick += 1
        if self.msgs_this_tick > self.limits.max_messages_per_tick:
            raise UspRuntimeError(
                "R006",
                f"message budget exceeded ({self.limits.max_messages_per_tick} "
                "messages in one tick)",
                span, seq,
            )
        counts = self.message_counts
        counts[op_name] = counts.get(op_name, 0) + 1
        if self._tracing:
            self._emit(sender, receiver, op_name, args)
        if self.depth >= self.limits.max_call_depth:
            raise UspRuntimeError(
                "R004",
                f"call depth exceeded {self.limits.max_call_depth}",
                span, seq,
            )
        env = {"@eng": self, "@self": receiver}
        for p, a in zip(cop.params, args):
            env[p] = a
        self.depth += 1
        try:
            r = cop.body(env)
        finally:
            self.depth -= 1
        return r[0] if r is not None else None

    def _emit(
        self,
        sender: EntityInstance | None,
        receiver: EntityInstance,
        op_name: str,
        args: tuple,
    ) -> None:
        sender_id = sender.id if sender is not None else "engine"
        line = (
            f'{{"tick":{self.tick},"seq":{self.seq},"sender":"{sender_id}",'
            f'"receiver":"{receiver.id}","op":"{op_name}",'
            f'"args":{_render_args(args)}}}\n'
        )
        data = line.encode("utf-8")
        if self._hasher is not None:
            self._hasher.update(data)
        if self._trace_file is not None:
            self._trace_file.write(data)
        if self.events is not None:
            self.events.append(
                TraceEvent(
                    self.tick, self.seq, sender_id, receiver.id, op_name,
                    tuple(_render_value(a) for a in args),
                )
            )

    def _sample_probes(self) -> None:
        for name, sampler in self.probe_samplers:
            self.probe_series[name].append(sampler(self))

    def trace_hash(self) -> str | None:
        return self._hasher.hexdigest() if self._hasher is not None else None

    def stats(self) -> RunStats:
        return RunStats(
            ticks=self.tick,
            seed=self.seed,
            message_counts=dict(self.message_counts),
            probe_series={k: list(v) for k, v in self.probe_series.items()},
        )


def instantiate(
    vm: ValidatedModel,
    root_class: str,
    seed: int,
    **kwargs,
) -> RunState:
    """Create the boundary and root instances, run the boundary's `init`
    hook (a zero-parameter «Rule» operation literally named init) at tick 0,
    then apply any slot overrides."""
    return RunState(vm, root_class, seed, **kwargs)


def run_tick(state: RunState) -> RunState:
    """Advance model time by one: exactly one engine-initiated invocation of
    the boundary's «Exist»."""
    if state.halted:
        raise UspRuntimeError(
            "R012", "run already halted", state.vm.model.source_span, state.seq
        )
    state.tick += 1
    state.msgs_this_tick = 0
    exist = state.boundary.cls.ops[state._exist_op]
    try:
        state.dispatch(None, state.boundary, state._exist_op, (), exist.span)
    except UspRuntimeError:
        state.halted = True
        raise
    state._sample_probes()
    return state


def run(
    vm: ValidatedModel,
    root_class: str,
    seed: int,
    ticks: int,
    probes: tuple[str, ...] | list[str] = (),
    *,
    overrides: dict[str, Any] | None = None,
    limits: RunLimits | None = None,
    trace_path: str | None = None,
    hash_trace: bool = True,
    collect_events: bool = False,
) -> RunResult:
    """Instantiate, run exactly `ticks` ticks, and collect trace + stats.

    On a runtime error the partially written trace file is flushed before
    the error propagates.
    """
    if ticks < 1:
        raise ValueError("ticks must be >= 1")
    fh = open(trace_path, "wb") if trace_path else None
    try:
        state = instantiate(
            vm, root_class, seed,
            overrides=overrides,
            probes=tuple(probes),
            limits=limits,
            trace_file=fh,
            hash_trace=hash_trace,
            collect_events=collect_events,
        )
        for _ in range(ticks):
            run_tick(state)
    finally:
        if fh is not None:
            fh.close()
    return RunResult(
        trace=Trace(hash_hex=state.trace_hash(), events=state.events),
        stats=state.stats(),
    )
