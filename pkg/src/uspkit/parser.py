"""Recursive-descent parser for `.usp` sources.

One token of lookahead, panic-mode recovery at declaration boundaries so a
broken class still lets later classes parse. The grammar is documented in
`docs/grammar.ebnf`.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import model as m
from .diagnostics import Diagnostic, Severity, Span, has_errors, sort_diagnostics
from .lexer import Token, TokenKind, decode_string, lex
from .stereotypes import Stereotype, UnknownStereotypeError, stereotype_of

_PRIMITIVES = {
    "Int": m.INT,
    "Real": m.REAL,
    "Bool": m.BOOL,
    "Text": m.TEXT,
}

_CLASS_SYNC = {"class", "abstract", "assoc"}
_MEMBER_SYNC = {"attr", "op"}


@dataclass
class ParseResult:
    """Outcome of a parse: a model (possibly partial on errors) plus
    diagnostics, sorted in the canonical order."""

    model: m.Model | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.model is not None and not has_errors(self.diagnostics)


class _ParseError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Parser:
    def __init__(self, tokens: list[Token], file_name: str):
        self.tokens = tokens
        self.file = file_name
        self.pos = 0
        self.diags: list[Diagnostic] = []

    # ---- token plumbing ----

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind is TokenKind.KEYWORD and t.lexeme == word

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind is TokenKind.PUNCT and t.lexeme == text

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind is not TokenKind.EOF:
            self.pos += 1
        return t

    def error(self, message: str, span: Span | None = None, rule: str = "P001") -> _ParseError:
        sp = span or self.peek().span
        return _ParseError(Diagnostic(rule, Severity.ERROR, message, sp))

    def expect_punct(self, text: str) -> Token:
        if self.at_punct(text):
            return self.advance()
        raise self.error(f"expected '{text}', found {self.peek().describe()}")

    def expect_kw(self, word: str) -> Token:
        if self.at_kw(word):
            return self.advance()
        raise self.error(f"expected '{word}', found {self.peek().describe()}")

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind is TokenKind.IDENT:
            return self.advance()
        raise self.error(f"expected {what}, found {t.describe()}")

    def span_from(self, start: Token) -> Span:
        end = self.tokens[max(self.pos - 1, 0)].span
        return Span(self.file, start.span.line, start.span.col, end.end_line, end.end_col)

    # ---- recovery ----

    def _decls_follow(self) -> bool:
        """True if class/assoc declarations still follow; the class keyword
        cannot occur inside bodies, so any hit means a displaced brace."""
        for t in self.tokens[self.pos:]:
            if t.kind is TokenKind.KEYWORD and t.lexeme in _CLASS_SYNC:
                return True
        return False

    def sync_top_level(self) -> None:
        """Skip to the next class/assoc declaration or the model's final brace."""
        depth = 0
        while True:
            t = self.peek()
            if t.kind is TokenKind.EOF:
                return
            if depth == 0:
                if t.kind is TokenKind.KEYWORD and t.lexeme in _CLASS_SYNC:
                    return
                if t.lexeme == "}":
                    return
            if t.lexeme == "{":
                depth += 1
            elif t.lexeme == "}" and depth > 0:
                depth -= 1
            self.advance()

    def sync_member(self) -> None:
        """Skip to the next attr/op or the enclosing class's closing brace."""
        depth = 0
        while True:
            t = self.peek()
            if t.kind is TokenKind.EOF:
                return
            if depth == 0:
                if t.kind is TokenKind.KEYWORD and (
                    t.lexeme in _MEMBER_SYNC or t.lexeme in _CLASS_SYNC
                ):
                    return
                if t.lexeme == "}":
                    return
                if t.lexeme == ";":
                    self.advance()
                    return
            if t.lexeme == "{":
                depth += 1
            elif t.lexeme == "}" and depth > 0:
                depth -= 1
            self.advance()

    def sync_statement(self) -> None:
        depth = 0
        while True:
            t = self.peek()
            if t.kind is TokenKind.EOF:
                return
            if depth == 0:
                if t.lexeme == ";":
                    self.advance()
                    return
                if t.lexeme == "}":
                    return
            if t.lexeme == "{":
                depth += 1
            elif t.lexeme == "}" and depth > 0:
                depth -= 1
            self.advance()

    # ---- declarations ----

    def parse_model(self) -> m.Model | None:
        start = self.peek()
        try:
            self.expect_kw("model")
            name = self.expect_ident("model name").lexeme
            self.expect_punct("{")
        except _ParseError as e:
            self.diags.append(e.diag)
            return None

        classes: list[m.ClassDef] = []
        assocs: list[m.AssociationDef] = []
        while True:
            t = self.peek()
            if t.kind is TokenKind.EOF:
                self.diags.append(
                    self.error("expected 'class', 'assoc' or '}'").diag
                )
                break
            if self.at_punct("}"):
                self.advance()
                if self._decls_follow():
                    # a closer displaced by earlier breakage; keep going so
                    # later declarations still parse
                    continue
                break
            if self.at_kw("assoc"):
                try:
                    assocs.append(self.parse_assoc())
                except _ParseError as e:
                    self.diags.append(e.diag)
                    self.sync_top_level()
                continue
            if self.at_kw("class") or self.at_kw("abstract"):
                try:
                    classes.append(self.parse_class())
                except _ParseError as e:
                    self.diags.append(e.diag)
                    self.sync_top_level()
                continue
            self.diags.append(
                self.error(
                    f"expected 'class', 'assoc' or '}}', found {t.describe()}"
                ).diag
            )
            self.advance()
            self.sync_top_level()

        trailing = self.peek()
        if trailing.kind is not TokenKind.EOF:
            self.diags.append(
                self.error(f"unexpected {trailing.describe()} after model body").diag
            )

        self.check_duplicate_classes(classes)
        return m.Model(
            name=name,
            classes=tuple(classes),
            associations=tuple(assocs),
            source_span=self.span_from(start),
        )

    def check_duplicate_classes(self, classes: list[m.ClassDef]) -> None:
        seen: dict[str, m.ClassDef] = {}
        for c in classes:
            first = seen.get(c.name)
            if first is None:
                seen[c.name] = c
            else:
                self.diags.append(
                    Diagnostic(
                        "P002",
                        Severity.ERROR,
                        f"duplicate class name '{c.name}' "
                        f"(first declared at {first.source_span})",
                        c.source_span,
                    )
                )

    def parse_stereotype(self) -> Stereotype:
        if self.peek().kind is not TokenKind.STEREO_OPEN:
            raise self.error(f"expected stereotype, found {self.peek().describe()}")
        self.advance()
        t = self.peek()
        # `in` doubles as a keyword and an attribute stereotype
        if t.kind in (TokenKind.IDENT, TokenKind.KEYWORD):
            name_tok = self.advance()
        else:
            raise self.error(f"expected stereotype name, found {t.describe()}")
        if self.peek().kind is not TokenKind.STEREO_CLOSE:
            raise self.error(f"expected '>>', found {self.peek().describe()}")
        self.advance()
        try:
            return stereotype_of(name_tok.lexeme)
        except UnknownStereotypeError as e:
            raise _ParseError(
                Diagnostic("P003", Severity.ERROR, str(e), name_tok.span)
            ) from None

    def parse_concept(self) -> str | None:
        if not self.at_kw("concept"):
            return None
        self.advance()
        t = self.peek()
        if t.kind is not TokenKind.STRING:
            raise self.error(f"expected text literal after 'concept', found {t.describe()}")
        self.advance()
        return decode_string(t.lexeme)

    def parse_class(self) -> m.ClassDef:
        start = self.peek()
        abstract = False
        if self.at_kw("abstract"):
            abstract = True
            self.advance()
        self.expect_kw("class")
        name = self.expect_ident("class name").lexeme
        stereo = self.parse_stereotype()
        extends = None
        if self.at_kw("extends"):
            self.advance()
            extends = self.expect_ident("superclass name").lexeme
        concept = self.parse_concept()
        self.expect_punct("{")

        attrs: list[m.AttrDef] = []
        ops: list[m.OpDef] = []
        while not self.at_punct("}"):
            t = self.peek()
            if t.kind is TokenKind.EOF:
                raise self.error("expected 'attr', 'op' or '}'")
            try:
                if self.at_kw("attr"):
                    attrs.append(self.parse_attr())
                elif self.at_kw("op"):
                    ops.append(self.parse_op())
                else:
                    raise self.error(
                        f"expected 'attr', 'op' or '}}', found {t.describe()}"
                    )
            except _ParseError as e:
                self.diags.append(e.diag)
                self.sync_member()
                if self.peek().kind is TokenKind.KEYWORD and (
                    self.peek().lexeme in _CLASS_SYNC
                ):
                    # the member error ran off the end of this class body
                    return m.ClassDef(
                        name, stereo, concept, abstract, extends,
                        tuple(attrs), tuple(ops), self.span_from(start),
                    )
        self.expect_punct("}")
        return m.ClassDef(
            name, stereo, concept, abstract, extends,
            tuple(attrs), tuple(ops), self.span_from(start),
        )

    def parse_attr(self) -> m.AttrDef:
        start = self.expect_kw("attr")
        name = self.expect_ident("attribute name").lexeme
        stereo = self.parse_stereotype()
        concept = self.parse_concept()
        self.expect_punct(":")
        type_ref = self.parse_attr_type()
        self.expect_punct(";")
        return m.AttrDef(
            name, stereo, concept, type_ref, type_ref.nullable, self.span_from(start)
        )

    def parse_attr_type(self) -> m.TypeRef:
        t = self.peek()
        if t.kind is TokenKind.IDENT and t.lexeme in _PRIMITIVES:
            self.advance()
            return _PRIMITIVES[t.lexeme]
        if t.kind is TokenKind.IDENT and t.lexeme == "list":
            self.advance()
            self.expect_punct("<")
            elem = self.expect_ident("element class name").lexeme
            self.expect_punct(">")
            return m.entity_list(elem)
        if t.kind is TokenKind.IDENT:
            self.advance()
            self.expect_punct("?")
            return m.entity(t.lexeme, nullable=True)
        raise self.error(f"expected type, found {t.describe()}")

    def parse_value_type(self) -> m.TypeRef:
        t = self.peek()
        if t.kind is TokenKind.IDENT and t.lexeme in _PRIMITIVES:
            self.advance()
            return _PRIMITIVES[t.lexeme]
        if t.kind is TokenKind.IDENT and t.lexeme == "list":
            self.advance()
            self.expect_punct("<")
            elem = self.expect_ident("element class name").lexeme
            self.expect_punct(">")
            return m.entity_list(elem)
        if t.kind is TokenKind.IDENT:
            self.advance()
            return m.entity(t.lexeme)
        raise self.error(f"expected type, found {t.describe()}")

    def parse_op(self) -> m.OpDef:
        start = self.expect_kw("op")
        name_tok = self.peek()
        if name_tok.kind is TokenKind.IDENT:
            self.advance()
        else:
            raise self.error(f"expected operation name, found {name_tok.describe()}")
        stereo = self.parse_stereotype()
        concept = self.parse_concept()
        params: list[m.Param] = []
        if self.at_punct("("):
            self.advance()
            while not self.at_punct(")"):
                if params:
                    self.expect_punct(",")
                p_start = self.peek()
                p_name = self.expect_ident("parameter name").lexeme
                self.expect_punct(":")
                p_type = self.parse_value_type()
                params.append(m.Param(p_name, p_type, self.span_from(p_start)))
            self.expect_punct(")")
        return_type = None
        if self.at_punct(":"):
            self.advance()
            return_type = self.parse_value_type()
        body = self.parse_block()
        return m.OpDef(
            name_tok.lexeme, stereo, concept, tuple(params), return_type,
            body, self.span_from(start),
        )

    def parse_assoc(self) -> m.AssociationDef:
        start = self.expect_kw("assoc")
        name = self.expect_ident("association name").lexeme
        stereo = self.parse_stereotype()
        end_a = self.expect_ident("class name").lexeme
        self.expect_punct("--")
        end_b = self.expect_ident("class name").lexeme
        self.expect_punct(";")
        return m.AssociationDef(name, stereo, end_a, end_b, self.span_from(start))

    # ---- statements ----

    def parse_block(self) -> tuple[m.Statement, ...]:
        self.expect_punct("{")
        stmts: list[m.Statement] = []
        while not self.at_punct("}"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error("expected statement or '}'")
            try:
                stmts.append(self.parse_statement())
            except _ParseError as e:
                self.diags.append(e.diag)
                self.sync_statement()
        self.expect_punct("}")
        return tuple(stmts)

    def parse_statement(self) -> m.Statement:
        t = self.peek()
        if self.at_kw("let"):
            start = self.advance()
            name = self.expect_ident("local name").lexeme
            self.expect_punct(":=")
            value = self.parse_expr()
            self.expect_punct(";")
            return m.LetStmt(name, value, self.span_from(start))
        if self.at_kw("send"):
            start = t
            send = self.parse_send_expr()
            self.expect_punct(";")
            return m.SendStmt(send, self.span_from(start))
        if self.at_kw("if"):
            return self.parse_if()
        if self.at_kw("foreach"):
            start = self.advance()
            var = self.expect_ident("loop variable").lexeme
            self.expect_kw("in")
            lst = self.parse_expr()
            body = self.parse_block()
            return m.ForeachStmt(var, lst, body, self.span_from(start))
        if self.at_kw("return"):
            start = self.advance()
            value = None
            if not self.at_punct(";"):
                value = self.parse_expr()
            self.expect_punct(";")
            return m.ReturnStmt(value, self.span_from(start))
        if t.kind is TokenKind.IDENT and t.lexeme == "push" and self.peek(1).lexeme == "(":
            start = self.advance()
            self.advance()  # (
            lst = self.parse_expr()
            self.expect_punct(",")
            value = self.parse_expr()
            self.expect_punct(")")
            self.expect_punct(";")
            return m.PushStmt(lst, value, self.span_from(start))
        if t.kind is TokenKind.IDENT and t.lexeme == "popFront" and self.peek(1).lexeme == "(":
            start = self.advance()
            self.advance()  # (
            lst = self.parse_expr()
            self.expect_punct(")")
            self.expect_punct(";")
            return m.PopFrontStmt(lst, self.span_from(start))

        # slot assignment: postfix ':=' expr ';'
        start = t
        target = self.parse_postfix()
        if not isinstance(target, m.SlotRead):
            raise self.error(
                "expected a statement; only slot targets may be assigned",
                start.span,
            )
        self.expect_punct(":=")
        value = self.parse_expr()
        self.expect_punct(";")
        return m.AssignStmt(target.obj, target.slot, value, self.span_from(start))

    def parse_if(self) -> m.IfStmt:
        start = self.expect_kw("if")
        cond = self.parse_expr()
        then_body = self.parse_block()
        else_body: tuple[m.Statement, ...] = ()
        if self.at_kw("else"):
            self.advance()
            if self.at_kw("if"):
                else_body = (self.parse_if(),)
            else:
                else_body = self.parse_block()
        return m.IfStmt(cond, then_body, else_body, self.span_from(start))

    # ---- expressions ----

    def parse_expr(self) -> m.Expr:
        return self.parse_or()

    def parse_or(self) -> m.Expr:
        left = self.parse_and()
        while self.at_punct("||"):
            op_tok = self.advance()
            right = self.parse_and()
            left = m.Binary("||", left, right, op_tok.span)
        return left

    def parse_and(self) -> m.Expr:
        left = self.parse_comparison()
        while self.at_punct("&&"):
            op_tok = self.advance()
            right = self.parse_comparison()
            left = m.Binary("&&", left, right, op_tok.span)
        return left

    _CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")

    def parse_comparison(self) -> m.Expr:
        left = self.parse_additive()
        t = self.peek()
        if t.kind is TokenKind.PUNCT and t.lexeme in self._CMP_OPS:
            self.advance()
            right = self.parse_additive()
            return m.Binary(t.lexeme, left, right, t.span)
        return left

    def parse_additive(self) -> m.Expr:
        left = self.parse_multiplicative()
        while self.at_punct("+") or self.at_punct("-"):
            op_tok = self.advance()
            right = self.parse_multiplicative()
            left = m.Binary(op_tok.lexeme, left, right, op_tok.span)
        return left

    def parse_multiplicative(self) -> m.Expr:
        left = self.parse_unary()
        while self.at_punct("*") or self.at_punct("/"):
            op_tok = self.advance()
            right = self.parse_unary()
            left = m.Binary(op_tok.lexeme, left, right, op_tok.span)
        return left

    def parse_unary(self) -> m.Expr:
        t = self.peek()
        if t.kind is TokenKind.PUNCT and t.lexeme in ("-", "!"):
            self.advance()
            operand = self.parse_unary()
            return m.Unary(t.lexeme, operand, t.span)
        return self.parse_postfix()

    def parse_postfix(self) -> m.Expr:
        expr = self.parse_primary()
        while self.at_punct("."):
            self.advance()
            slot_tok = self.expect_ident("slot name")
            expr = m.SlotRead(expr, slot_tok.lexeme, slot_tok.span)
        return expr

    def parse_send_expr(self) -> m.SendExpr:
        start = self.expect_kw("send")
        chain = self.parse_postfix()
        if not isinstance(chain, m.SlotRead):
            raise self.error("expected 'send receiver.operation(...)'", start.span)
        receiver, op_name = chain.obj, chain.slot
        self.expect_punct("(")
        args: list[m.Expr] = []
        while not self.at_punct(")"):
            if args:
                self.expect_punct(",")
            args.append(self.parse_expr())
        self.expect_punct(")")
        return m.SendExpr(receiver, op_name, tuple(args), self.span_from(start))

    def parse_primary(self) -> m.Expr:
        t = self.peek()
        if t.kind is TokenKind.INT:
            self.advance()
            return m.IntLit(int(t.lexeme), t.span)
        if t.kind is TokenKind.REAL:
            self.advance()
            return m.RealLit(float(t.lexeme), t.span)
        if t.kind is TokenKind.STRING:
            self.advance()
            return m.TextLit(decode_string(t.lexeme), t.span)
        if self.at_kw("true"):
            self.advance()
            return m.BoolLit(True, t.span)
        if self.at_kw("false"):
            self.advance()
            return m.BoolLit(False, t.span)
        if self.at_kw("null"):
            self.advance()
            return m.NullLit(t.span)
        if self.at_kw("self"):
            self.advance()
            return m.SelfRef(t.span)
        if self.at_kw("send"):
            return self.parse_send_expr()
        if self.at_kw("new"):
            self.advance()
            cls_tok = self.expect_ident("class name")
            self.expect_punct("(")
            fields: list[tuple[str, m.Expr]] = []
            while not self.at_punct(")"):
                if fields:
                    self.expect_punct(",")
                f_name = self.expect_ident("field name").lexeme
                self.expect_punct(":")
                fields.append((f_name, self.parse_expr()))
            self.expect_punct(")")
            return m.NewExpr(cls_tok.lexeme, tuple(fields), t.span)
        if t.kind is TokenKind.IDENT:
            if self.peek(1).lexeme == "(":
                if t.lexeme == "rand":
                    self.advance()
                    self.advance()
                    self.expect_punct(")")
                    return m.RandCall(t.span)
                if t.lexeme == "len":
                    self.advance()
                    self.advance()
                    arg = self.parse_expr()
                    self.expect_punct(")")
                    return m.LenCall(arg, t.span)
                raise self.error(
                    f"unknown builtin '{t.lexeme}' (only rand() and len() exist)",
                    t.span,
                )
            self.advance()
            return m.NameRef(t.lexeme, t.span)
        if self.at_punct("("):
            self.advance()
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        raise self.error(f"expected expression, found {t.describe()}")


def parse(source: str, file_name: str = "<string>") -> ParseResult:
    """Parse `.usp` text into a Model.

    On errors the result still carries whatever declarations could be
    recovered, so callers may inspect partial parses.
    """
    tokens, lex_diags = lex(source, file_name)
    parser = _Parser(tokens, file_name)
    parsed = parser.parse_model()
    diags = sort_diagnostics(lex_diags + parser.diags)
    if parsed is None:
        return ParseResult(None, diags)
    return ParseResult(parsed, diags)


def parse_file(path: str) -> ParseResult:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), path)
