import pytest
from pydantic import ValidationError

from dsl.model_parser import parse_model
from models.program_model import (
    CONSTRUCTOR_SELECTOR,
    CallSite,
    ClassDef,
    ClassHierarchy,
    Dispatch,
    MethodDef,
    ProgramModel,
    SiteId,
    VarRef,
    ViolationCode,
    synthesize_default_constructors,
    validate,
)


def codes(text: str):
    return validate(parse_model(text)).codes()


class TestCallSite:
    def test_typed_needs_receiver(self):
        with pytest.raises(ValidationError):
            CallSite(ordinal=0, dispatch=Dispatch.TYPED, target_selector="m")

    def test_receiver_only_on_typed(self):
        with pytest.raises(ValidationError):
            CallSite(ordinal=0, dispatch=Dispatch.SELF, target_selector="m", receiver_class="A")

    def test_negative_ordinal(self):
        with pytest.raises(ValidationError):
            CallSite(ordinal=-1, dispatch=Dispatch.UNTYPED, target_selector="m")

    def test_frozen(self):
        site = CallSite(ordinal=0, dispatch=Dispatch.UNTYPED, target_selector="m")
        with pytest.raises(ValidationError):
            site.ordinal = 1


def test_site_id_str():
    assert str(SiteId("B", "aMethod", 1)) == "B.aMethod#1"


class TestClassHierarchy:
    @pytest.fixture
    def hierarchy(self):
        return ClassHierarchy(parse_model("""
            class A { method m { } method n { } }
            class B extends A { method m { } }
            class C extends B { }
            class D extends A { }
        """))

    def test_ancestors_and_descendants(self, hierarchy):
        assert hierarchy.ancestors("C") == ["B", "A"]
        assert hierarchy.ancestors("C", include_self=True) == ["C", "B", "A"]
        assert hierarchy.descendants("A") == ["B", "D", "C"]
        assert hierarchy.descendants("C") == []

    def test_lookup(self, hierarchy):
        assert hierarchy.lookup("C", "m") == "B"
        assert hierarchy.lookup("C", "n") == "A"
        assert hierarchy.lookup("B", "m", include_self=False) == "A"
        assert hierarchy.lookup("A", "m", include_self=False) is None
        assert hierarchy.lookup("D", "missing") is None

    def test_implementors(self, hierarchy):
        assert hierarchy.implementors("m") == ["A", "B"]
        assert hierarchy.is_ancestor_or_self("A", "C")
        assert not hierarchy.is_ancestor_or_self("D", "C")

    def test_cycle_is_tolerated(self):
        hierarchy = ClassHierarchy(parse_model("class A extends B { } class B extends A { }"))
        assert hierarchy.ancestors("A") == ["B"]
        assert hierarchy.inheritance_cycles() == [frozenset({"A", "B"})]


class TestValidate:
    def test_fixtures_are_valid(self, fig5_model, mediator_model, mediator_v2_model, vending_model):
        for model in (fig5_model, mediator_model, mediator_v2_model, vending_model):
            assert validate(model).ok

    def test_duplicates(self):
        assert ViolationCode.DUPLICATE_CLASS in codes("class A { } class A { }")
        assert ViolationCode.DUPLICATE_METHOD in codes("class A { method m { } method m { } }")
        assert ViolationCode.DUPLICATE_VARIABLE in codes("class A { var x var x }")

    def test_hierarchy_problems(self):
        assert codes("class A extends Nope { }") == [ViolationCode.UNKNOWN_SUPERCLASS]
        assert ViolationCode.INHERITANCE_CYCLE in codes("class A extends B { } class B extends A { }")
        assert codes("class A { var x : Nope }") == [ViolationCode.UNKNOWN_TYPE]

    def test_call_sites(self):
        assert codes("class A { method m { call Nope.m } }") == [ViolationCode.UNKNOWN_CLASS]
        assert codes("class A { method m { call A.n } }") == [ViolationCode.UNRESOLVED_SELECTOR]
        assert codes("class A { method m { call self.n } }") == [ViolationCode.UNRESOLVED_SELECTOR]
        assert codes("class A { method m { call ?.n } }") == [ViolationCode.UNRESOLVED_SELECTOR]
        assert codes("class A { method m { call super.m } }") == [ViolationCode.ILLEGAL_SUPER]

    def test_typed_instantiation(self):
        assert codes("class A { method m { call B.<init> } } class B { }") == []
        assert codes("class A { method m { call B.<init> } } class B { ctor method make { } }") == [
            ViolationCode.UNRESOLVED_SELECTOR]
        assert codes("class A { method m { call B.<init> } } class B { ctor method <init> { } }") == []

    def test_variables(self):
        assert codes("class A { method m { uses B.x } } class B { var x }") == [
            ViolationCode.UNRESOLVED_VARIABLE]
        assert codes("class A { var x } class B extends A { method m { defs x } }") == []

    def test_bad_ordinal(self):
        method = MethodDef(selector="m", call_sites=(
            CallSite(ordinal=1, dispatch=Dispatch.SELF, target_selector="m"),))
        model = ProgramModel(classes=(ClassDef(name="A", methods=(method,)),))
        assert validate(model).codes() == [ViolationCode.BAD_ORDINAL]

    def test_reserved_selector(self):
        model = ProgramModel(classes=(ClassDef(name="A", methods=(MethodDef(selector=CONSTRUCTOR_SELECTOR),)),))
        assert validate(model).codes() == [ViolationCode.RESERVED_SELECTOR]


class TestDefaultConstructors:
    def test_synthesized_ctor_defines_own_variables(self, fig5_model):
        completed = synthesize_default_constructors(fig5_model)
        ctor = completed.class_named("B").method(CONSTRUCTOR_SELECTOR)
        assert ctor.is_constructor
        assert ctor.var_defs == (VarRef(owner_class="B", var_name="myA"),)
        assert completed.method_count() == fig5_model.method_count() + 2

    def test_idempotent(self, fig5_model):
        once = synthesize_default_constructors(fig5_model)
        assert synthesize_default_constructors(once) is once

    def test_explicit_ctor_kept(self):
        model = parse_model("class A { var x ctor method make { defs x } }")
        assert synthesize_default_constructors(model) is model
