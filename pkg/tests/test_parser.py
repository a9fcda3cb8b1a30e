import pytest

from uspkit import Stereotype, parse
from uspkit.lexer import TokenKind, lex
from uspkit import model as m


def test_empty_model():
    result = parse("model M { }")
    assert result.ok
    assert result.model.name == "M"
    assert result.model.classes == ()


def test_corpus_class_roster(corpus_model):
    names = [c.name for c in corpus_model.classes]
    assert names == [
        "Component", "Leaf", "Composite", "Node", "Root",
        "QueueMember", "Customer",
    ]


def test_corpus_shapes(corpus_model):
    composite = corpus_model.class_named("Composite")
    assert composite.abstract
    assert composite.stereotype is Stereotype.WHOLE
    assert composite.extends == "Component"
    assert [a.name for a in composite.attrs] == ["list", "head", "tail"]
    assert composite.attrs[0].type == m.entity_list("Component")
    assert composite.attrs[1].type == m.entity("QueueMember", nullable=True)

    node = corpus_model.class_named("Node")
    assert not node.abstract
    assert [op.name for op in node.ops] == [
        "Exist", "enter", "standInQueue", "approachClerk", "shiftQueue", "leave",
    ]
    street = corpus_model.associations[0]
    assert (street.end_a, street.end_b) == ("Root", "Node")
    assert street.stereotype is Stereotype.CHANNEL


def test_duplicate_class_name_reports_both_spans():
    result = parse('model M { class A «whole» { } class A «atom» { } }', "dup.usp")
    assert not result.ok
    dups = [d for d in result.diagnostics if d.rule_id == "P002"]
    assert len(dups) == 1
    assert "duplicate class name 'A'" in dups[0].message
    assert "dup.usp:1:11" in dups[0].message  # first declaration
    assert dups[0].span.col == 31  # second declaration


def test_unknown_stereotype_suggestion():
    result = parse("model M { class A «Exists» { } }")
    assert not result.ok
    assert any(
        d.rule_id == "P003" and "Exist" in d.message for d in result.diagnostics
    )


def test_syntax_error_lists_expectation():
    result = parse("model M { class A «whole» attr }")
    assert not result.ok
    assert any("expected" in d.message for d in result.diagnostics)


def test_error_recovery_reaches_later_classes():
    source = """
model M {
    class Broken «whole» {
        attr x «state» Int;
    }
    class Fine «atom» concept "ok" {
        attr y «state» : Int;
    }
}
"""
    result = parse(source)
    assert not result.ok
    assert result.model is not None
    names = [c.name for c in result.model.classes]
    assert "Fine" in names
    fine = result.model.class_named("Fine")
    assert [a.name for a in fine.attrs] == ["y"]


def test_multiple_errors_reported_in_one_pass():
    source = """
model M {
    class B1 «whole» {
        attr x «state» Int;
    }
    class B2 «atom» concept "ok" {
        op f «Rule» { let y := ; }
    }
    class Fine «atom» concept "ok2" { }
}
"""
    result = parse(source)
    errors = [d for d in result.diagnostics if d.rule_id.startswith("P")]
    assert len(errors) >= 2
    assert result.model.class_named("Fine") is not None


def test_structural_equality_ignores_layout():
    a = parse('model M { class A «atom» concept "x" { attr n «state» : Int; } }')
    b = parse(
        'model M {\n  class A «atom»\n    concept "x" {\n'
        "    attr n «state» : Int;\n  }\n}"
    )
    assert a.ok and b.ok
    assert a.model == b.model


def test_spans_enclose_declarations(corpus_source, corpus_model):
    lines = corpus_source.splitlines()
    for cls in corpus_model.classes:
        sp = cls.source_span
        decl_line = lines[sp.line - 1]
        assert "class" in decl_line and cls.name in decl_line
        assert sp.end_line >= sp.line
        for attr in cls.attrs:
            assert sp.line <= attr.source_span.line <= sp.end_line
        for op in cls.ops:
            assert sp.line <= op.source_span.line <= sp.end_line
            assert op.source_span.end_line >= op.source_span.line


def test_statement_grammar_roundtrips():
    source = """
model M {
    class World «boundary» concept "w" {
        attr n «state» : Int;
        attr f «state» : Real;
        attr kids «parts» : list<World>;
        op Exist «Exist» {
        }
        op math «Rule» (a: Int, b: Real) : Int {
            let x := a * 2 + 4 / 2;
            let cond := x > 1 && !(a == 3) || b < 0.5;
            if cond {
                self.n := -x;
            } else if x == 2 {
                self.n := 0;
            } else {
                self.n := x;
            }
            foreach w in self.kids {
                push(self.kids, w);
            }
            popFront(self.kids);
            return x;
        }
    }
}
"""
    result = parse(source)
    assert result.ok, [d.render() for d in result.diagnostics]
    op = result.model.class_named("World").ops[1]
    assert isinstance(op.body[2], m.IfStmt)
    assert isinstance(op.body[2].else_body[0], m.IfStmt)
    assert isinstance(op.body[-1], m.ReturnStmt)


def test_unary_minus_and_precedence():
    result = parse(
        'model M { class W «boundary» concept "w" { op Exist «Exist» { '
        "let x := 1 + 2 * 3; let y := -(x) * 2; } } }"
    )
    assert result.ok
    body = result.model.classes[0].ops[0].body
    first = body[0].value
    assert isinstance(first, m.Binary) and first.op == "+"
    assert isinstance(first.right, m.Binary) and first.right.op == "*"


# ---------------------------------------------------------------------------
# mutation harness: single-token deletions must not cascade
# ---------------------------------------------------------------------------

def _subsequent_classes_survive(original, mutant, deleted_tok) -> bool:
    if mutant is None:
        return False
    by_name = {c.name: c for c in mutant.classes}
    for cls in original.classes:
        sp = cls.source_span
        starts_after = (sp.line, sp.col) > (
            deleted_tok.span.end_line, deleted_tok.span.end_col
        )
        if starts_after and by_name.get(cls.name) != cls:
            return False
    return True


def test_recovery_mutation_rate(corpus_source, corpus_model):
    tokens, _ = lex(corpus_source)
    tokens = [t for t in tokens if t.kind is not TokenKind.EOF]
    ok = 0
    for tok in tokens:
        mutated = (
            corpus_source[: tok.offset]
            + corpus_source[tok.offset + len(tok.lexeme):]
        )
        result = parse(mutated, "mutant.usp")
        if result.ok:
            ok += 1
        elif _subsequent_classes_survive(corpus_model, result.model, tok):
            ok += 1
    rate = ok / len(tokens)
    assert rate >= 0.95, f"recovery rate {rate:.3f} over {len(tokens)} mutants"
