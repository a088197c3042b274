"""
Recursive-descent parser for the `.mdl` program-model language.

    model    := { class }
    class    := "class" IDENT [ "extends" IDENT ] [ "abstract" ] "{" { var | method } "}"
    var      := "var" IDENT [ ":" IDENT ]
    method   := [ "ctor" ] "method" IDENT [ "body" STRING ] "{" { stmt } "}"
    stmt     := "call" receiver "." IDENT | "uses" varref | "defs" varref
    receiver := "self" | "super" | IDENT | "?"
    varref   := [ IDENT "." ] IDENT

Only syntax is checked here; name resolution problems are reported by
models.program_model.validate.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from models.errors import ParseError
from models.program_model import (
    CallSite,
    ClassDef,
    ClassHierarchy,
    Dispatch,
    MethodDef,
    ProgramModel,
    VarDecl,
    VarRef,
)

from .tokenizer import Token, tokenize

logger = logging.getLogger(__name__)


@dataclass
class _RawRef:
    owner: Optional[str]
    name: str


@dataclass
class _RawMethod:
    selector: str
    is_constructor: bool
    fingerprint: Optional[str]
    sites: List[CallSite] = field(default_factory=list)
    uses: List[_RawRef] = field(default_factory=list)
    defs: List[_RawRef] = field(default_factory=list)


@dataclass
class _RawClass:
    name: str
    superclass: Optional[str]
    is_abstract: bool
    variables: List[VarDecl] = field(default_factory=list)
    methods: List[_RawMethod] = field(default_factory=list)


class ModelParser:
    def __init__(self, text: str, file: str = "<model>"):
        self.file = file
        self.tokens: List[Token] = list(tokenize(text.lstrip("\ufeff"), file))
        self.pos = 0

    # token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != "EOF":
            self.pos += 1
        return token

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == "KEYWORD" and token.value in words

    def at_punct(self, symbol: str) -> bool:
        token = self.peek()
        return token.kind == "PUNCT" and token.value == symbol

    def fail(self, expected: Iterable[str]) -> ParseError:
        token = self.peek()
        return ParseError(f"unexpected {token.describe()}", token.span, expected)

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.fail([f"'{word}'"])
        return self.advance()

    def expect_punct(self, symbol: str) -> Token:
        if not self.at_punct(symbol):
            raise self.fail([f"'{symbol}'"])
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> str:
        if self.peek().kind != "IDENT":
            raise self.fail([what])
        return self.advance().value

    # grammar

    def parse_classes(self) -> List[_RawClass]:
        classes: List[_RawClass] = []
        while self.peek().kind != "EOF":
            if not self.at_keyword("class"):
                raise self.fail(["'class'", "end of input"])
            classes.append(self.parse_class())
        return classes

    def parse_class(self) -> _RawClass:
        self.expect_keyword("class")
        name = self.expect_ident("class name")
        superclass = None
        if self.at_keyword("extends"):
            self.advance()
            superclass = self.expect_ident("superclass name")
        is_abstract = False
        if self.at_keyword("abstract"):
            self.advance()
            is_abstract = True
        if not self.at_punct("{"):
            raise self.fail(["'{'", "'extends'", "'abstract'"])
        self.advance()

        raw = _RawClass(name=name, superclass=superclass, is_abstract=is_abstract)
        while not self.at_punct("}"):
            if self.at_keyword("var"):
                raw.variables.append(self.parse_var(name))
            elif self.at_keyword("method", "ctor"):
                raw.methods.append(self.parse_method())
            else:
                raise self.fail(["'var'", "'method'", "'ctor'", "'}'"])
        self.advance()
        return raw

    def parse_var(self, owner: str) -> VarDecl:
        self.expect_keyword("var")
        var_name = self.expect_ident("variable name")
        declared_type = None
        if self.at_punct(":"):
            self.advance()
            declared_type = self.expect_ident("type name")
        return VarDecl(owner_class=owner, var_name=var_name, declared_type=declared_type)

    def parse_method(self) -> _RawMethod:
        is_constructor = False
        if self.at_keyword("ctor"):
            self.advance()
            is_constructor = True
        self.expect_keyword("method")
        selector = self.expect_ident("selector")
        fingerprint = None
        if self.at_keyword("body"):
            self.advance()
            if self.peek().kind != "STRING":
                raise self.fail(["string literal"])
            fingerprint = self.advance().value
        if not self.at_punct("{"):
            raise self.fail(["'{'", "'body'"])
        self.advance()

        raw = _RawMethod(selector=selector, is_constructor=is_constructor, fingerprint=fingerprint)
        while not self.at_punct("}"):
            if self.at_keyword("call"):
                self.advance()
                raw.sites.append(self.parse_call(len(raw.sites)))
            elif self.at_keyword("uses"):
                self.advance()
                raw.uses.append(self.parse_varref())
            elif self.at_keyword("defs"):
                self.advance()
                raw.defs.append(self.parse_varref())
            else:
                raise self.fail(["'call'", "'uses'", "'defs'", "'}'"])
        self.advance()
        return raw

    def parse_call(self, ordinal: int) -> CallSite:
        token = self.peek()
        receiver = None
        if token.kind == "KEYWORD" and token.value == "self":
            dispatch = Dispatch.SELF
        elif token.kind == "KEYWORD" and token.value == "super":
            dispatch = Dispatch.SUPER
        elif token.kind == "PUNCT" and token.value == "?":
            dispatch = Dispatch.UNTYPED
        elif token.kind == "IDENT":
            dispatch = Dispatch.TYPED
            receiver = token.value
        else:
            raise self.fail(["'self'", "'super'", "'?'", "class name"])
        self.advance()
        self.expect_punct(".")
        selector = self.expect_ident("selector")
        return CallSite(ordinal=ordinal, dispatch=dispatch, target_selector=selector, receiver_class=receiver)

    def parse_varref(self) -> _RawRef:
        first = self.expect_ident("variable name")
        if self.at_punct("."):
            self.advance()
            return _RawRef(owner=first, name=self.expect_ident("variable name"))
        return _RawRef(owner=None, name=first)


def _dedupe(refs: List[VarRef]) -> Tuple[VarRef, ...]:
    seen = []
    for ref in refs:
        if ref not in seen:
            seen.append(ref)
    return tuple(seen)


def _assemble(raw_classes: List[_RawClass], model_id: str) -> ProgramModel:
    # Variable owners resolve against the declared hierarchy, so build it first.
    skeleton = ProgramModel(
        model_id=model_id,
        classes=tuple(
            ClassDef(name=c.name, superclass=c.superclass, instance_vars=tuple(c.variables))
            for c in raw_classes
        ),
    )
    hierarchy = ClassHierarchy(skeleton)

    def resolve(ref: _RawRef, enclosing: str) -> VarRef:
        owner = ref.owner
        if owner is None:
            owner = hierarchy.resolve_variable(enclosing, ref.name) or enclosing
        return VarRef(owner_class=owner, var_name=ref.name)

    classes = []
    for raw in raw_classes:
        methods = tuple(
            MethodDef(
                selector=m.selector,
                is_constructor=m.is_constructor,
                body_fingerprint=m.fingerprint,
                call_sites=tuple(m.sites),
                var_uses=_dedupe([resolve(r, raw.name) for r in m.uses]),
                var_defs=_dedupe([resolve(r, raw.name) for r in m.defs]),
            )
            for m in raw.methods
        )
        classes.append(ClassDef(
            name=raw.name,
            superclass=raw.superclass,
            is_abstract=raw.is_abstract,
            instance_vars=tuple(raw.variables),
            methods=methods,
        ))
    return ProgramModel(model_id=model_id, classes=tuple(classes))


def parse_model(text: str, model_id: str = "", file: str = "<model>") -> ProgramModel:
    """Parse `.mdl` text into a ProgramModel; call-site ordinals follow source order per method."""
    parser = ModelParser(text, file)
    raw_classes = parser.parse_classes()
    model = _assemble(raw_classes, model_id)
    logger.debug(f"Parsed {file}: {len(model.classes)} classes, {model.method_count()} methods")
    return model
