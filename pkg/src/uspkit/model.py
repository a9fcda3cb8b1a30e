"""In-memory metamodel for parsed models: classes, slots, operations and the
statement/expression micro-language used in operation bodies.

Equality is structural; source spans never participate in comparisons so a
model equals its canonical-form reparse.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .diagnostics import Span
from .stereotypes import FRAME_STEREOTYPES, Stereotype

_NO_SPAN = Span("<none>", 0, 0)


class TypeKind(enum.Enum):
    INT = "Int"
    REAL = "Real"
    BOOL = "Bool"
    TEXT = "Text"
    ENTITY = "entity"
    ENTITY_LIST = "list"


@dataclass(frozen=True)
class TypeRef:
    kind: TypeKind
    class_name: str | None = None
    nullable: bool = False

    def __str__(self) -> str:
        if self.kind is TypeKind.ENTITY_LIST:
            return f"list<{self.class_name}>"
        if self.kind is TypeKind.ENTITY:
            return self.class_name + ("?" if self.nullable else "")
        return self.kind.value


INT = TypeRef(TypeKind.INT)
REAL = TypeRef(TypeKind.REAL)
BOOL = TypeRef(TypeKind.BOOL)
TEXT = TypeRef(TypeKind.TEXT)


def entity(class_name: str, nullable: bool = False) -> TypeRef:
    return TypeRef(TypeKind.ENTITY, class_name, nullable)


def entity_list(class_name: str) -> TypeRef:
    return TypeRef(TypeKind.ENTITY_LIST, class_name)


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class RealLit(Expr):
    value: float
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class TextLit(Expr):
    value: str
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class NullLit(Expr):
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class SelfRef(Expr):
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class NameRef(Expr):
    """Reference to a parameter, local or foreach variable."""

    name: str
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class SlotRead(Expr):
    obj: Expr
    slot: str
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "-" or "!"
    operand: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # + - * / == != < <= > >= && ||
    left: Expr
    right: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class RandCall(Expr):
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class LenCall(Expr):
    arg: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class NewExpr(Expr):
    class_name: str
    fields: tuple[tuple[str, Expr], ...]
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class SendExpr(Expr):
    receiver: Expr
    op: str
    args: tuple[Expr, ...]
    span: Span = field(default=_NO_SPAN, compare=False)


# --------------------------------------------------------------------------
# Statements
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Statement:
    pass


@dataclass(frozen=True)
class LetStmt(Statement):
    name: str
    value: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class AssignStmt(Statement):
    """`target.slot := value` where target is any entity-valued expression."""

    target: Expr
    slot: str
    value: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class SendStmt(Statement):
    send: SendExpr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class IfStmt(Statement):
    cond: Expr
    then_body: tuple[Statement, ...]
    else_body: tuple[Statement, ...]
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class ForeachStmt(Statement):
    """Iterates a snapshot of the list taken at loop entry."""

    var: str
    list_expr: Expr
    body: tuple[Statement, ...]
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class PushStmt(Statement):
    list_expr: Expr
    value: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class PopFrontStmt(Statement):
    list_expr: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class ReturnStmt(Statement):
    value: Expr | None
    span: Span = field(default=_NO_SPAN, compare=False)


# --------------------------------------------------------------------------
# Declarations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    type: TypeRef
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class AttrDef:
    name: str
    stereotype: Stereotype
    concept: str | None
    type: TypeRef
    nullable: bool
    source_span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class OpDef:
    name: str
    stereotype: Stereotype
    concept: str | None
    params: tuple[Param, ...]
    return_type: TypeRef | None
    body: tuple[Statement, ...]
    source_span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class ClassDef:
    name: str
    stereotype: Stereotype
    concept: str | None
    abstract: bool
    extends: str | None
    attrs: tuple[AttrDef, ...]
    ops: tuple[OpDef, ...]
    source_span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class AssociationDef:
    name: str
    stereotype: Stereotype
    end_a: str
    end_b: str
    source_span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Model:
    name: str
    classes: tuple[ClassDef, ...]
    associations: tuple[AssociationDef, ...] = ()
    # Reserved hook; runtime initialisation is the boundary's «Rule» op
    # literally named `init`.
    init: str | None = None
    source_span: Span = field(default=_NO_SPAN, compare=False)

    def class_named(self, name: str) -> ClassDef | None:
        for c in self.classes:
            if c.name == name:
                return c
        return None


def is_frame(c: ClassDef) -> bool:
    """A frame class is stereotyped whole/part/atom/boundary; «link» is not."""
    return c.stereotype in FRAME_STEREOTYPES
