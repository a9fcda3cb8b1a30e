"""Profile well-formedness rules (SP001..SP013) and static typing of
operation bodies.

Rule ids are stable public API. Each violated rule yields one diagnostic
per offending element; diagnostics come back sorted by source position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import model as m
from .diagnostics import Diagnostic, Severity, Span, has_errors, sort_diagnostics
from .model import TypeKind, TypeRef
from .stereotypes import ElementKind, Stereotype

# internal type sentinels; never appear in declarations
_NULL_T = TypeRef(TypeKind.ENTITY, "<null>", True)
_VOID_T = TypeRef(TypeKind.TEXT, "<void>")
_ERROR_T = TypeRef(TypeKind.TEXT, "<error>")


def _is_null_t(t: TypeRef) -> bool:
    return t.class_name == "<null>"


def _is_error_t(t: TypeRef) -> bool:
    return t.class_name == "<error>"


def _is_void_t(t: TypeRef) -> bool:
    return t.class_name == "<void>"


@dataclass
class ValidatedModel:
    """A model that passed every rule, plus the flattened tables and the
    per-expression types the engine executes against."""

    model: m.Model
    classes: dict[str, m.ClassDef]
    ancestors: dict[str, tuple[str, ...]]  # nearest first, excludes self
    attr_table: dict[str, tuple[m.AttrDef, ...]]  # inherited first
    op_table: dict[str, dict[str, m.OpDef]]
    boundary: m.ClassDef
    expr_types: dict[int, TypeRef] = field(repr=False, default_factory=dict)

    def attrs_of(self, class_name: str) -> tuple[m.AttrDef, ...]:
        return self.attr_table[class_name]

    def is_subclass(self, sub: str, sup: str) -> bool:
        return sub == sup or sup in self.ancestors.get(sub, ())


@dataclass
class ValidationResult:
    validated: ValidatedModel | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.validated is not None


class _Checker:
    def __init__(self, model: m.Model):
        self.model = model
        self.diags: list[Diagnostic] = []
        self.classes: dict[str, m.ClassDef] = {}
        for c in model.classes:
            self.classes.setdefault(c.name, c)
        self.ancestors: dict[str, tuple[str, ...]] = {}
        self.attr_table: dict[str, tuple[m.AttrDef, ...]] = {}
        self.op_table: dict[str, dict[str, m.OpDef]] = {}
        self.expr_types: dict[int, TypeRef] = {}
        self.broken: set[str] = set()  # classes with unusable inheritance

    def err(self, rule: str, message: str, span: Span) -> None:
        self.diags.append(Diagnostic(rule, Severity.ERROR, message, span))

    def warn(self, rule: str, message: str, span: Span) -> None:
        self.diags.append(Diagnostic(rule, Severity.WARNING, message, span))

    # ---- SP013: stereotype/element-kind agreement ----

    def check_kinds(self) -> None:
        for c in self.model.classes:
            if c.stereotype.element_kind is not ElementKind.CLASS:
                self.err(
                    "SP013",
                    f"class '{c.name}' carries «{c.stereotype}», "
                    f"{_an_kind(c.stereotype)} stereotype",
                    c.source_span,
                )
            for a in c.attrs:
                if a.stereotype.element_kind is not ElementKind.ATTRIBUTE:
                    self.err(
                        "SP013",
                        f"attribute '{c.name}.{a.name}' carries «{a.stereotype}», "
                        f"{_an_kind(a.stereotype)} stereotype",
                        a.source_span,
                    )
            for op in c.ops:
                if op.stereotype.element_kind is not ElementKind.OPERATION:
                    self.err(
                        "SP013",
                        f"operation '{c.name}.{op.name}' carries «{op.stereotype}», "
                        f"{_an_kind(op.stereotype)} stereotype",
                        op.source_span,
                    )
        for assoc in self.model.associations:
            if assoc.stereotype is not Stereotype.CHANNEL:
                self.err(
                    "SP013",
                    f"association '{assoc.name}' carries «{assoc.stereotype}», "
                    f"{_an_kind(assoc.stereotype)} stereotype",
                    assoc.source_span,
                )
            for end in (assoc.end_a, assoc.end_b):
                target = self.classes.get(end)
                if target is None:
                    self.err(
                        "SP013",
                        f"association '{assoc.name}' end '{end}' is not a declared class",
                        assoc.source_span,
                    )
                elif not m.is_frame(target):
                    self.err(
                        "SP013",
                        f"association '{assoc.name}' end '{end}' is not a frame class",
                        assoc.source_span,
                    )

    # ---- SP012: inheritance discipline ----

    def check_inheritance(self) -> None:
        for c in self.model.classes:
            if c.extends is None:
                continue
            sup = self.classes.get(c.extends)
            if sup is None:
                self.err(
                    "SP012",
                    f"class '{c.name}' extends unknown class '{c.extends}'",
                    c.source_span,
                )
                self.broken.add(c.name)
                continue
            both_classes = (
                c.stereotype.element_kind is ElementKind.CLASS
                and sup.stereotype.element_kind is ElementKind.CLASS
            )
            if both_classes and m.is_frame(c) != m.is_frame(sup):
                self.err(
                    "SP012",
                    f"class '{c.name}' ({_frameness(c)}) cannot extend "
                    f"'{sup.name}' ({_frameness(sup)})",
                    c.source_span,
                )
        # cycle detection over resolvable edges
        reported: set[str] = set()
        for c in self.model.classes:
            if c.name in reported:
                continue
            seen: list[str] = []
            cur: m.ClassDef | None = c
            while cur is not None and cur.extends is not None:
                if cur.name in seen:
                    cycle = seen[seen.index(cur.name):] + [cur.name]
                    self.err(
                        "SP012",
                        "inheritance cycle: " + " -> ".join(cycle),
                        self.classes[cycle[0]].source_span,
                    )
                    reported.update(cycle)
                    self.broken.update(cycle)
                    break
                seen.append(cur.name)
                cur = self.classes.get(cur.extends)

    def flatten(self) -> None:
        done: set[str] = set()

        def visit(name: str) -> None:
            if name in done:
                return
            done.add(name)
            c = self.classes[name]
            attrs: list[m.AttrDef] = []
            ops: dict[str, m.OpDef] = {}
            if c.extends and c.extends in self.classes and name not in self.broken:
                visit(c.extends)
                attrs.extend(self.attr_table.get(c.extends, ()))
                ops.update(self.op_table.get(c.extends, {}))
            own_attr_seen: set[str] = set()
            for a in c.attrs:
                if a.name in own_attr_seen:
                    self.err(
                        "SP011",
                        f"duplicate attribute '{a.name}' in class '{c.name}'",
                        a.source_span,
                    )
                    continue
                own_attr_seen.add(a.name)
                if any(prev.name == a.name for prev in attrs):
                    self.err(
                        "SP011",
                        f"attribute '{c.name}.{a.name}' redeclares an inherited slot",
                        a.source_span,
                    )
                    continue
                attrs.append(a)
            own_seen: set[str] = set()
            for op in c.ops:
                if op.name in own_seen:
                    self.err(
                        "SP011",
                        f"duplicate operation '{op.name}' in class '{c.name}'",
                        op.source_span,
                    )
                    continue
                own_seen.add(op.name)
                inherited = ops.get(op.name)
                if inherited is not None and not _same_signature(op, inherited):
                    self.err(
                        "SP012",
                        f"override '{c.name}.{op.name}' must keep the inherited "
                        "signature and stereotype",
                        op.source_span,
                    )
                ops[op.name] = op
            self.attr_table[name] = tuple(attrs)
            self.op_table[name] = ops

        for c in self.model.classes:
            visit(c.name)
        # ancestor chains (broken classes get what is resolvable)
        for c in self.model.classes:
            chain: list[str] = []
            cur = c.extends
            while cur is not None and cur in self.classes and cur not in chain:
                chain.append(cur)
                cur = self.classes[cur].extends
            self.ancestors[c.name] = tuple(chain)

    # ---- structural rules ----

    def check_structure(self) -> m.ClassDef | None:
        boundaries = [
            c for c in self.model.classes if c.stereotype is Stereotype.BOUNDARY
        ]
        if not boundaries:
            self.err(
                "SP001",
                "model must declare exactly one «boundary» class (found none)",
                self.model.source_span,
            )
        for extra in boundaries[1:]:
            self.err(
                "SP001",
                f"model must declare exactly one «boundary» class; "
                f"'{extra.name}' is an additional one",
                extra.source_span,
            )
        boundary = boundaries[0] if len(boundaries) == 1 else None

        if boundary is not None:
            exists = [
                op
                for op in self.op_table.get(boundary.name, {}).values()
                if op.stereotype is Stereotype.EXIST
            ]
            if len(exists) != 1:
                self.err(
                    "SP002",
                    f"«boundary» class '{boundary.name}' must declare exactly one "
                    f"«Exist» operation (found {len(exists)})",
                    boundary.source_span,
                )

        for c in self.model.classes:
            if c.stereotype.element_kind is not ElementKind.CLASS:
                continue
            flat_attrs = self.attr_table.get(c.name, ())
            parts = [a for a in flat_attrs if a.stereotype is Stereotype.PARTS]
            if m.is_frame(c) and c.concept is None:
                self.err(
                    "SP003",
                    f"frame class '{c.name}' must carry a concept tag",
                    c.source_span,
                )
            if c.stereotype is Stereotype.LINK and c.concept is not None:
                self.err(
                    "SP004",
                    f"«link» class '{c.name}' must not carry a concept tag",
                    c.source_span,
                )
            if c.stereotype is Stereotype.WHOLE and len(parts) != 1:
                self.err(
                    "SP005",
                    f"«whole» class '{c.name}' must declare exactly one «parts» "
                    f"attribute, own or inherited (found {len(parts)})",
                    c.source_span,
                )
            if c.stereotype is Stereotype.ATOM and parts:
                self.err(
                    "SP006",
                    f"«atom» class '{c.name}' must not have «parts» attributes",
                    c.source_span,
                )
            if c.stereotype is Stereotype.PART:
                has_in = any(a.stereotype is Stereotype.IN for a in flat_attrs)
                has_out = any(a.stereotype is Stereotype.OUT for a in flat_attrs)
                if not (has_in and has_out):
                    self.err(
                        "SP007",
                        f"«part» class '{c.name}' must declare at least one «in» "
                        "and one «out» attribute (it is an open system)",
                        c.source_span,
                    )
            for a in c.attrs:
                if a.stereotype is Stereotype.REF and not (
                    a.type.kind is TypeKind.ENTITY and a.nullable
                ):
                    self.err(
                        "SP009",
                        f"«ref» attribute '{c.name}.{a.name}' must have a nullable "
                        f"entity-reference type (has {a.type})",
                        a.source_span,
                    )
                if a.stereotype is Stereotype.PARTS and a.type.kind is not TypeKind.ENTITY_LIST:
                    self.err(
                        "SP011",
                        f"«parts» attribute '{c.name}.{a.name}' must have a list "
                        f"type (has {a.type})",
                        a.source_span,
                    )
                if (
                    a.type.kind in (TypeKind.ENTITY, TypeKind.ENTITY_LIST)
                    and a.type.class_name not in self.classes
                ):
                    self.err(
                        "SP011",
                        f"attribute '{c.name}.{a.name}' references unknown class "
                        f"'{a.type.class_name}'",
                        a.source_span,
                    )
            for op in c.ops:
                if op.stereotype is Stereotype.EXIST and (
                    op.params or op.return_type is not None
                ):
                    self.err(
                        "SP008",
                        f"«Exist» operation '{c.name}.{op.name}' must take no "
                        "parameters and return nothing",
                        op.source_span,
                    )

        # advisory: concept shared by several frames
        by_concept: dict[str, list[str]] = {}
        for c in self.model.classes:
            if m.is_frame(c) and c.concept is not None:
                by_concept.setdefault(c.concept, []).append(c.name)
        for concept, names in by_concept.items():
            if len(names) > 1:
                self.warn(
                    "SP101",
                    f"concept \"{concept}\" is shared by frames "
                    + ", ".join(names),
                    self.classes[names[1]].source_span,
                )
        return boundary

    # ---- SP011/SP010: operation body typing ----

    def check_bodies(self) -> None:
        for c in self.model.classes:
            if c.name in self.broken:
                continue
            for op in c.ops:
                env: dict[str, TypeRef] = {}
                for p in op.params:
                    if p.name in env:
                        self.err(
                            "SP011",
                            f"duplicate parameter '{p.name}'",
                            p.span,
                        )
                    if (
                        p.type.kind in (TypeKind.ENTITY, TypeKind.ENTITY_LIST)
                        and p.type.class_name not in self.classes
                    ):
                        self.err(
                            "SP011",
                            f"parameter '{p.name}' references unknown class "
                            f"'{p.type.class_name}'",
                            p.span,
                        )
                    env[p.name] = p.type
                self.check_block(op.body, dict(env), c, op)

    def check_block(
        self,
        body: tuple[m.Statement, ...],
        env: dict[str, TypeRef],
        cls: m.ClassDef,
        op: m.OpDef,
    ) -> None:
        for s in body:
            self.check_stmt(s, env, cls, op)

    def check_stmt(
        self,
        s: m.Statement,
        env: dict[str, TypeRef],
        cls: m.ClassDef,
        op: m.OpDef,
    ) -> None:
        if isinstance(s, m.LetStmt):
            t = self.type_of(s.value, env, cls)
            if _is_void_t(t):
                self.err("SP011", "cannot bind a value-less send", s.span)
                t = _ERROR_T
            if _is_null_t(t):
                self.err(
                    "SP011",
                    f"cannot infer a type for '{s.name}' from a bare null",
                    s.span,
                )
                t = _ERROR_T
            if s.name in env:
                self.err(
                    "SP011",
                    f"'{s.name}' is already bound in this operation",
                    s.span,
                )
            env[s.name] = t
        elif isinstance(s, m.AssignStmt):
            target_t = self.type_of(s.target, env, cls)
            value_t = self.type_of(s.value, env, cls)
            attr = self.resolve_slot(target_t, s.slot, s.span)
            if attr is not None:
                if attr.type.kind is TypeKind.ENTITY_LIST:
                    self.err(
                        "SP011",
                        f"cannot assign list slot '{s.slot}'; use push/popFront",
                        s.span,
                    )
                elif not self.assignable(attr.type, value_t):
                    self.err(
                        "SP011",
                        f"cannot assign {_show(value_t)} to slot '{s.slot}' "
                        f"of type {attr.type}",
                        s.span,
                    )
        elif isinstance(s, m.SendStmt):
            self.type_of_send(s.send, env, cls, value_needed=False)
        elif isinstance(s, m.IfStmt):
            cond_t = self.type_of(s.cond, env, cls)
            if not _is_error_t(cond_t) and cond_t.kind is not TypeKind.BOOL:
                self.err(
                    "SP011",
                    f"if-condition must be Bool, got {_show(cond_t)}",
                    s.span,
                )
            self.check_block(s.then_body, dict(env), cls, op)
            self.check_block(s.else_body, dict(env), cls, op)
        elif isinstance(s, m.ForeachStmt):
            lst_t = self.type_of(s.list_expr, env, cls)
            elem_t = _ERROR_T
            if _is_error_t(lst_t):
                pass
            elif lst_t.kind is not TypeKind.ENTITY_LIST:
                self.err(
                    "SP011",
                    f"foreach expects a list, got {_show(lst_t)}",
                    s.span,
                )
            else:
                elem_t = m.entity(lst_t.class_name)
            if s.var in env:
                self.err(
                    "SP011",
                    f"loop variable '{s.var}' is already bound",
                    s.span,
                )
            inner = dict(env)
            inner[s.var] = elem_t
            self.check_block(s.body, inner, cls, op)
        elif isinstance(s, m.PushStmt):
            lst_t = self.type_of(s.list_expr, env, cls)
            val_t = self.type_of(s.value, env, cls)
            if not _is_error_t(lst_t) and lst_t.kind is not TypeKind.ENTITY_LIST:
                self.err("SP011", f"push expects a list slot, got {_show(lst_t)}", s.span)
            elif not _is_error_t(lst_t) and not self.assignable(
                m.entity(lst_t.class_name), val_t, allow_null=False
            ):
                self.err(
                    "SP011",
                    f"cannot push {_show(val_t)} into {lst_t}",
                    s.span,
                )
        elif isinstance(s, m.PopFrontStmt):
            lst_t = self.type_of(s.list_expr, env, cls)
            if not _is_error_t(lst_t) and lst_t.kind is not TypeKind.ENTITY_LIST:
                self.err(
                    "SP011",
                    f"popFront expects a list slot, got {_show(lst_t)}",
                    s.span,
                )
        elif isinstance(s, m.ReturnStmt):
            if s.value is None:
                if op.return_type is not None:
                    self.err(
                        "SP011",
                        f"operation '{cls.name}.{op.name}' must return "
                        f"{op.return_type}",
                        s.span,
                    )
            else:
                t = self.type_of(s.value, env, cls)
                if op.return_type is None:
                    self.err(
                        "SP011",
                        f"operation '{cls.name}.{op.name}' returns nothing",
                        s.span,
                    )
                elif not self.assignable(op.return_type, t):
                    self.err(
                        "SP011",
                        f"cannot return {_show(t)} from an operation typed "
                        f"{op.return_type}",
                        s.span,
                    )
        else:
            raise TypeError(f"unknown statement node: {s!r}")

    def resolve_slot(self, obj_t: TypeRef, slot: str, span: Span) -> m.AttrDef | None:
        if _is_error_t(obj_t):
            return None
        if obj_t.kind is not TypeKind.ENTITY or _is_null_t(obj_t):
            self.err("SP011", f"{_show(obj_t)} has no slots", span)
            return None
        for a in self.attr_table.get(obj_t.class_name, ()):
            if a.name == slot:
                return a
        self.err(
            "SP011",
            f"class '{obj_t.class_name}' has no slot '{slot}'",
            span,
        )
        return None

    def assignable(self, dst: TypeRef, src: TypeRef, allow_null: bool = True) -> bool:
        if _is_error_t(src) or _is_error_t(dst):
            return True  # already reported
        if _is_null_t(src):
            return allow_null and dst.kind is TypeKind.ENTITY
        if dst.kind is TypeKind.ENTITY and src.kind is TypeKind.ENTITY:
            return self.is_subclass(src.class_name, dst.class_name)
        if dst.kind is TypeKind.ENTITY_LIST or src.kind is TypeKind.ENTITY_LIST:
            return (
                dst.kind is src.kind and dst.class_name == src.class_name
            )
        return dst.kind is src.kind

    def is_subclass(self, sub: str, sup: str) -> bool:
        return sub == sup or sup in self.ancestors.get(sub, ())

    def type_of(self, e: m.Expr, env: dict[str, TypeRef], cls: m.ClassDef) -> TypeRef:
        t = self._type_of(e, env, cls)
        self.expr_types[id(e)] = t
        return t

    def _type_of(self, e: m.Expr, env: dict[str, TypeRef], cls: m.ClassDef) -> TypeRef:
        if isinstance(e, m.IntLit):
            return m.INT
        if isinstance(e, m.RealLit):
            return m.REAL
        if isinstance(e, m.BoolLit):
            return m.BOOL
        if isinstance(e, m.TextLit):
            return m.TEXT
        if isinstance(e, m.NullLit):
            return _NULL_T
        if isinstance(e, m.SelfRef):
            return m.entity(cls.name)
        if isinstance(e, m.NameRef):
            t = env.get(e.name)
            if t is None:
                self.err("SP011", f"unknown name '{e.name}'", e.span)
                return _ERROR_T
            return t
        if isinstance(e, m.SlotRead):
            obj_t = self.type_of(e.obj, env, cls)
            attr = self.resolve_slot(obj_t, e.slot, e.span)
            return attr.type if attr is not None else _ERROR_T
        if isinstance(e, m.Unary):
            t = self.type_of(e.operand, env, cls)
            if _is_error_t(t):
                return t
            if e.op == "-":
                if t.kind in (TypeKind.INT, TypeKind.REAL):
                    return t
                self.err("SP011", f"unary '-' needs Int or Real, got {_show(t)}", e.span)
            else:
                if t.kind is TypeKind.BOOL:
                    return m.BOOL
                self.err("SP011", f"'!' needs Bool, got {_show(t)}", e.span)
            return _ERROR_T
        if isinstance(e, m.Binary):
            return self.type_of_binary(e, env, cls)
        if isinstance(e, m.RandCall):
            return m.REAL
        if isinstance(e, m.LenCall):
            t = self.type_of(e.arg, env, cls)
            if not _is_error_t(t) and t.kind is not TypeKind.ENTITY_LIST:
                self.err("SP011", f"len() needs a list slot, got {_show(t)}", e.span)
            return m.INT
        if isinstance(e, m.NewExpr):
            return self.type_of_new(e, env, cls)
        if isinstance(e, m.SendExpr):
            return self.type_of_send(e, env, cls, value_needed=True)
        raise TypeError(f"unknown expression node: {e!r}")

    _NUMERIC = (TypeKind.INT, TypeKind.REAL)

    def type_of_binary(self, e: m.Binary, env, cls) -> TypeRef:
        lt = self.type_of(e.left, env, cls)
        rt = self.type_of(e.right, env, cls)
        if _is_error_t(lt) or _is_error_t(rt):
            return _ERROR_T
        op = e.op
        if op in ("&&", "||"):
            if lt.kind is TypeKind.BOOL and rt.kind is TypeKind.BOOL:
                return m.BOOL
            self.err("SP011", f"'{op}' needs Bool operands", e.span)
            return _ERROR_T
        if op in ("+", "-", "*", "/"):
            if lt.kind in self._NUMERIC and rt.kind in self._NUMERIC:
                if lt.kind is TypeKind.INT and rt.kind is TypeKind.INT:
                    return m.INT
                return m.REAL
            self.err("SP011", f"'{op}' needs Int or Real operands", e.span)
            return _ERROR_T
        if op in ("<", "<=", ">", ">="):
            if lt.kind in self._NUMERIC and rt.kind in self._NUMERIC:
                return m.BOOL
            self.err("SP011", f"'{op}' needs Int or Real operands", e.span)
            return _ERROR_T
        # == / !=
        ok = (
            (lt.kind in self._NUMERIC and rt.kind in self._NUMERIC)
            or (lt.kind is rt.kind and lt.kind in (TypeKind.BOOL, TypeKind.TEXT))
            or (lt.kind is TypeKind.ENTITY and rt.kind is TypeKind.ENTITY)
        )
        if not ok:
            self.err(
                "SP011",
                f"'{op}' cannot compare {_show(lt)} with {_show(rt)}",
                e.span,
            )
            return _ERROR_T
        return m.BOOL

    def type_of_new(self, e: m.NewExpr, env, cls) -> TypeRef:
        target = self.classes.get(e.class_name)
        if target is None:
            self.err("SP011", f"new of unknown class '{e.class_name}'", e.span)
            return _ERROR_T
        if target.abstract:
            self.err(
                "SP010",
                f"cannot instantiate abstract class '{e.class_name}'",
                e.span,
            )
        attrs = {a.name: a for a in self.attr_table.get(e.class_name, ())}
        seen: set[str] = set()
        for name, value in e.fields:
            value_t = self.type_of(value, env, cls)
            if name in seen:
                self.err("SP011", f"field '{name}' initialised twice", e.span)
                continue
            seen.add(name)
            attr = attrs.get(name)
            if attr is None:
                self.err(
                    "SP011",
                    f"class '{e.class_name}' has no slot '{name}'",
                    e.span,
                )
                continue
            if attr.type.kind is TypeKind.ENTITY_LIST:
                self.err(
                    "SP011",
                    f"list slot '{name}' cannot be initialised in new",
                    e.span,
                )
            elif not self.assignable(attr.type, value_t):
                self.err(
                    "SP011",
                    f"cannot initialise slot '{name}' of type {attr.type} "
                    f"with {_show(value_t)}",
                    e.span,
                )
        return m.entity(e.class_name)

    def type_of_send(
        self, e: m.SendExpr, env, cls, value_needed: bool
    ) -> TypeRef:
        recv_t = self.type_of(e.receiver, env, cls)
        arg_ts = [self.type_of(a, env, cls) for a in e.args]
        if _is_error_t(recv_t):
            return _ERROR_T
        if recv_t.kind is not TypeKind.ENTITY or _is_null_t(recv_t):
            self.err(
                "SP011",
                f"send receiver must be an entity, got {_show(recv_t)}",
                e.span,
            )
            return _ERROR_T
        target = self.op_table.get(recv_t.class_name, {}).get(e.op)
        if target is None:
            self.err(
                "SP011",
                f"class '{recv_t.class_name}' has no operation '{e.op}'",
                e.span,
            )
            return _ERROR_T
        if len(arg_ts) != len(target.params):
            self.err(
                "SP011",
                f"'{recv_t.class_name}.{e.op}' takes {len(target.params)} "
                f"argument(s), got {len(arg_ts)}",
                e.span,
            )
        else:
            for p, at in zip(target.params, arg_ts):
                if not self.assignable(p.type, at):
                    self.err(
                        "SP011",
                        f"argument '{p.name}' of '{recv_t.class_name}.{e.op}' "
                        f"expects {p.type}, got {_show(at)}",
                        e.span,
                    )
        if target.return_type is None:
            if value_needed:
                self.err(
                    "SP011",
                    f"operation '{recv_t.class_name}.{e.op}' returns nothing",
                    e.span,
                )
                return _ERROR_T
            return _VOID_T
        return target.return_type


def _same_signature(a: m.OpDef, b: m.OpDef) -> bool:
    return (
        a.stereotype is b.stereotype
        and a.return_type == b.return_type
        and tuple(p.type for p in a.params) == tuple(p.type for p in b.params)
    )


def _an_kind(s: Stereotype) -> str:
    kind = s.element_kind.value
    article = "an" if kind[0] in "aeiou" else "a"
    return f"{article} {kind}"


def _frameness(c: m.ClassDef) -> str:
    return "a frame class" if m.is_frame(c) else "a non-frame class"


def _show(t: TypeRef) -> str:
    if _is_null_t(t):
        return "null"
    if _is_void_t(t):
        return "nothing"
    if _is_error_t(t):
        return "<error>"
    return str(t)


def validate(model: m.Model) -> ValidationResult:
    """Apply every profile rule; a ValidatedModel exists only when no
    error-severity diagnostic was produced."""
    checker = _Checker(model)
    checker.check_kinds()
    checker.check_inheritance()
    checker.flatten()
    boundary = checker.check_structure()
    checker.check_bodies()
    diags = sort_diagnostics(checker.diags)
    if has_errors(diags) or boundary is None:
        return ValidationResult(None, diags)
    vm = ValidatedModel(
        model=model,
        classes=checker.classes,
        ancestors=checker.ancestors,
        attr_table=checker.attr_table,
        op_table=checker.op_table,
        boundary=boundary,
        expr_types=checker.expr_types,
    )
    return ValidationResult(vm, diags)
