import random

import pytest

from dsl.model_parser import parse_model
from dsl.model_writer import serialize_model
from dsl.tokenizer import SourceSpan, escape_string, is_identifier, tokenize
from models.errors import ParseError
from models.program_model import Dispatch, VarRef


def test_tokens_carry_spans():
    tokens = list(tokenize('class A {\n  method m body "x\\ty" { }\n}', file="t.mdl"))
    kinds = [t.kind for t in tokens]
    assert kinds[:3] == ["KEYWORD", "IDENT", "PUNCT"]
    body = next(t for t in tokens if t.kind == "STRING")
    assert body.value == "x\ty"
    assert body.span == SourceSpan("t.mdl", 2, 17)
    assert tokens[-1].kind == "EOF"


def test_identifiers():
    assert is_identifier("Widget_2")
    assert is_identifier("<init>")
    assert not is_identifier("class")
    assert not is_identifier("2x")


def test_escape_string():
    assert escape_string('a"b\\c\n') == '"a\\"b\\\\c\\n"'


def test_parse_fig5(fig5_model):
    assert fig5_model.model_id == "fig5"
    b = fig5_model.class_named("B")
    assert b.superclass == "A"
    method = b.method("aMethod")
    assert method.body_fingerprint == "b1"
    assert [s.dispatch for s in method.call_sites] == [Dispatch.SUPER, Dispatch.TYPED]
    assert [s.ordinal for s in method.call_sites] == [0, 1]
    assert method.call_sites[1].receiver_class == "A"
    assert method.var_uses == (VarRef(owner_class="B", var_name="myA"),)


def test_inherited_variable_resolves_to_owner():
    model = parse_model("class A { var x } class B extends A { method m { uses x defs x uses x } }")
    method = model.class_named("B").method("m")
    assert method.var_uses == (VarRef(owner_class="A", var_name="x"),)
    assert method.var_defs == (VarRef(owner_class="A", var_name="x"),)


def test_untyped_and_ctor():
    model = parse_model("class A abstract { ctor method make { } method m { call ?.m } }")
    cls = model.class_named("A")
    assert cls.is_abstract
    assert cls.method("make").is_constructor
    assert cls.method("m").call_sites[0].dispatch is Dispatch.UNTYPED


def test_empty_model():
    assert parse_model("").classes == ()
    assert serialize_model(parse_model("# only a comment\n")) == ""


def test_bom_is_ignored():
    assert parse_model("\ufeffclass A { }").class_named("A") is not None


class TestParseErrors:
    def test_position_and_expected(self):
        with pytest.raises(ParseError) as info:
            parse_model("class A { method }", file="bad.mdl")
        assert info.value.span == SourceSpan("bad.mdl", 1, 18)
        assert info.value.expected == frozenset({"selector"})
        assert str(info.value).startswith("bad.mdl:1:18: ")

    def test_unterminated_string(self):
        with pytest.raises(ParseError, match="unterminated string"):
            parse_model('class A { method m body "open { } }')

    def test_unknown_escape(self):
        with pytest.raises(ParseError, match="escape"):
            parse_model('class A { method m body "\\q" { } }')

    def test_stray_character(self):
        with pytest.raises(ParseError, match="unexpected character"):
            parse_model("class A { var x ; }")

    def test_missing_class_keyword(self):
        with pytest.raises(ParseError) as info:
            parse_model("method m { }")
        assert "'class'" in info.value.expected


def test_serialize_is_canonical(fig5_model):
    text = serialize_model(fig5_model)
    assert text.startswith("class A {\n  var x\n  method aMethod body \"a1\" {\n    defs x\n  }\n}\n")
    assert "    call super.aMethod\n    call A.aMethod\n    uses myA\n" in text
    assert parse_model(text, model_id="fig5") == fig5_model
    assert serialize_model(parse_model(text)) == text


def test_fixture_round_trip(mediator_model, vending_model):
    for model in (mediator_model, vending_model):
        assert parse_model(serialize_model(model), model_id=model.model_id) == model


def test_random_models_round_trip():
    from model_factory import random_model

    rng = random.Random(7)
    for _ in range(200):
        model = random_model(rng)
        assert parse_model(serialize_model(model), model_id=model.model_id) == model
