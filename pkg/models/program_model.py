"""
Language-neutral program model standing in for source code.

A ProgramModel is one program version: classes with single inheritance,
instance variables, and methods described by their call sites and
variable accesses. Models are frozen pydantic records, so they can be
shared freely and compared structurally.
"""

import logging
from collections import deque
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

CONSTRUCTOR_SELECTOR = "<init>"
ABSTRACT_FINGERPRINT = "abstract"


class Dispatch(str, Enum):
    SELF = "self"
    SUPER = "super"
    TYPED = "typed"
    UNTYPED = "untyped"


class SiteId(NamedTuple):
    """(class, selector, ordinal) identity of a call site."""
    class_name: str
    selector: str
    ordinal: int

    def __str__(self) -> str:
        return f"{self.class_name}.{self.selector}#{self.ordinal}"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class CallSite(_Frozen):
    ordinal: int = Field(ge=0, description="Position of the site within its method, in source order.")
    dispatch: Dispatch
    target_selector: str
    receiver_class: Optional[str] = Field(default=None, description="Declared receiver class of a TYPED site.")

    @model_validator(mode="after")
    def _receiver_only_when_typed(self) -> "CallSite":
        if self.dispatch is Dispatch.TYPED and not self.receiver_class:
            raise ValueError("TYPED call site needs a receiver_class")
        if self.dispatch is not Dispatch.TYPED and self.receiver_class is not None:
            raise ValueError(f"{self.dispatch.value} call site cannot carry a receiver_class")
        return self


class VarRef(_Frozen):
    owner_class: str
    var_name: str

    def __str__(self) -> str:
        return f"{self.owner_class}.{self.var_name}"


class VarDecl(_Frozen):
    owner_class: str
    var_name: str
    declared_type: Optional[str] = None


class MethodDef(_Frozen):
    selector: str
    is_constructor: bool = False
    body_fingerprint: Optional[str] = None
    call_sites: Tuple[CallSite, ...] = ()
    var_uses: Tuple[VarRef, ...] = ()
    var_defs: Tuple[VarRef, ...] = ()


class ClassDef(_Frozen):
    name: str
    superclass: Optional[str] = None
    is_abstract: bool = False
    instance_vars: Tuple[VarDecl, ...] = ()
    methods: Tuple[MethodDef, ...] = ()

    def method(self, selector: str) -> Optional[MethodDef]:
        for method in self.methods:
            if method.selector == selector:
                return method
        return None

    def declares(self, selector: str) -> bool:
        return self.method(selector) is not None

    def variable(self, var_name: str) -> Optional[VarDecl]:
        for decl in self.instance_vars:
            if decl.var_name == var_name:
                return decl
        return None

    def has_constructor(self) -> bool:
        return any(m.is_constructor for m in self.methods)


class ProgramModel(_Frozen):
    model_id: str = ""
    classes: Tuple[ClassDef, ...] = ()

    def class_named(self, name: str) -> Optional[ClassDef]:
        for cls in self.classes:
            if cls.name == name:
                return cls
        return None

    def iter_methods(self) -> Iterator[Tuple[ClassDef, MethodDef]]:
        for cls in self.classes:
            for method in cls.methods:
                yield cls, method

    def method_count(self) -> int:
        return sum(len(cls.methods) for cls in self.classes)


class ClassHierarchy:
    """
    Name resolution over a model's inheritance tree.

    Tolerates invalid models (unknown superclasses, cycles) so validation
    can use it before the model is known to be well formed.
    """

    def __init__(self, model: ProgramModel):
        self.model = model
        self.classes: Dict[str, ClassDef] = {}
        for cls in model.classes:
            self.classes.setdefault(cls.name, cls)
        self.children: Dict[str, List[str]] = {name: [] for name in self.classes}
        for name, cls in self.classes.items():
            if cls.superclass in self.classes and cls.superclass != name:
                self.children[cls.superclass].append(name)

    def has_class(self, name: Optional[str]) -> bool:
        return name is not None and name in self.classes

    def superclass_of(self, name: str) -> Optional[str]:
        cls = self.classes.get(name)
        if cls is None or cls.superclass not in self.classes:
            return None
        return cls.superclass

    def ancestors(self, name: str, include_self: bool = False) -> List[str]:
        """Classes above `name`, nearest first. Stops at unknown names and cycles."""
        chain: List[str] = [name] if include_self and name in self.classes else []
        seen: Set[str] = {name}
        current = self.superclass_of(name)
        while current is not None and current not in seen:
            chain.append(current)
            seen.add(current)
            current = self.superclass_of(current)
        return chain

    def descendants(self, name: str) -> List[str]:
        """Transitive subclasses of `name` in breadth-first, model order."""
        result: List[str] = []
        seen: Set[str] = {name}
        queue = deque(self.children.get(name, []))
        while queue:
            child = queue.popleft()
            if child in seen:
                continue
            seen.add(child)
            result.append(child)
            queue.extend(self.children.get(child, []))
        return result

    def is_ancestor_or_self(self, candidate: str, name: str) -> bool:
        return candidate == name or candidate in self.ancestors(name)

    def lookup(self, class_name: str, selector: str, include_self: bool = True) -> Optional[str]:
        """First class declaring `selector`, searching upward from `class_name`."""
        for candidate in self.ancestors(class_name, include_self=include_self):
            if self.classes[candidate].declares(selector):
                return candidate
        return None

    def implementors(self, selector: str) -> List[str]:
        return [name for name, cls in self.classes.items() if cls.declares(selector)]

    def resolve_variable(self, class_name: str, var_name: str) -> Optional[str]:
        """Owner of `var_name` as seen from `class_name` (self first, then upward)."""
        for candidate in self.ancestors(class_name, include_self=True):
            if self.classes[candidate].variable(var_name) is not None:
                return candidate
        return None

    def inheritance_cycles(self) -> List[FrozenSet[str]]:
        cycles: List[FrozenSet[str]] = []
        for start in self.classes:
            path: List[str] = []
            index: Dict[str, int] = {}
            current: Optional[str] = start
            while current is not None and current not in index:
                index[current] = len(path)
                path.append(current)
                current = self.superclass_of(current)
            if current is not None:
                cycle = frozenset(path[index[current]:])
                if cycle not in cycles:
                    cycles.append(cycle)
        return cycles


class ViolationCode(str, Enum):
    DUPLICATE_CLASS = "DUPLICATE_CLASS"
    DUPLICATE_METHOD = "DUPLICATE_METHOD"
    DUPLICATE_VARIABLE = "DUPLICATE_VARIABLE"
    UNKNOWN_SUPERCLASS = "UNKNOWN_SUPERCLASS"
    INHERITANCE_CYCLE = "INHERITANCE_CYCLE"
    UNKNOWN_CLASS = "UNKNOWN_CLASS"
    UNKNOWN_TYPE = "UNKNOWN_TYPE"
    UNRESOLVED_SELECTOR = "UNRESOLVED_SELECTOR"
    ILLEGAL_SUPER = "ILLEGAL_SUPER"
    UNRESOLVED_VARIABLE = "UNRESOLVED_VARIABLE"
    BAD_ORDINAL = "BAD_ORDINAL"
    RESERVED_SELECTOR = "RESERVED_SELECTOR"


class Violation(_Frozen):
    code: ViolationCode
    message: str
    subject: str = ""


class ValidationReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> List[ViolationCode]:
        return [v.code for v in self.violations]

    def __len__(self) -> int:
        return len(self.violations)


def validate(model: ProgramModel) -> ValidationReport:
    """Collect every invariant violation of `model`. An empty report means valid."""
    hierarchy = ClassHierarchy(model)
    violations: List[Violation] = []

    def report(code: ViolationCode, message: str, subject: str = "") -> None:
        violations.append(Violation(code=code, message=message, subject=subject))

    seen_classes: Set[str] = set()
    for cls in model.classes:
        if cls.name in seen_classes:
            report(ViolationCode.DUPLICATE_CLASS, f"class {cls.name} declared more than once", cls.name)
        seen_classes.add(cls.name)

    for cycle in hierarchy.inheritance_cycles():
        members = ", ".join(sorted(cycle))
        report(ViolationCode.INHERITANCE_CYCLE, f"inheritance cycle among {members}", members)

    for cls in model.classes:
        if cls.superclass is not None and not hierarchy.has_class(cls.superclass):
            report(ViolationCode.UNKNOWN_SUPERCLASS,
                   f"class {cls.name} extends unknown class {cls.superclass}", cls.name)

        seen_vars: Set[str] = set()
        for decl in cls.instance_vars:
            subject = f"{cls.name}.{decl.var_name}"
            if decl.var_name in seen_vars:
                report(ViolationCode.DUPLICATE_VARIABLE, f"variable {subject} declared more than once", subject)
            seen_vars.add(decl.var_name)
            if decl.declared_type is not None and not hierarchy.has_class(decl.declared_type):
                report(ViolationCode.UNKNOWN_TYPE,
                       f"variable {subject} has unknown type {decl.declared_type}", subject)

        seen_selectors: Set[str] = set()
        for method in cls.methods:
            subject = f"{cls.name}.{method.selector}"
            if method.selector in seen_selectors:
                report(ViolationCode.DUPLICATE_METHOD, f"method {subject} declared more than once", subject)
            seen_selectors.add(method.selector)
            if method.selector == CONSTRUCTOR_SELECTOR and not method.is_constructor:
                report(ViolationCode.RESERVED_SELECTOR,
                       f"{subject}: selector {CONSTRUCTOR_SELECTOR} is reserved for constructors", subject)
            _validate_method(hierarchy, cls, method, report)

    if violations:
        logger.debug(f"Model {model.model_id!r}: {len(violations)} violation(s)")
    return ValidationReport(violations=violations)


def _validate_method(hierarchy: ClassHierarchy, cls: ClassDef, method: MethodDef, report) -> None:
    for index, site in enumerate(method.call_sites):
        site_id = SiteId(cls.name, method.selector, site.ordinal)
        selector = site.target_selector
        if site.ordinal != index:
            report(ViolationCode.BAD_ORDINAL,
                   f"{site_id}: ordinal {site.ordinal} at position {index}", str(site_id))

        if site.dispatch is Dispatch.TYPED:
            if not hierarchy.has_class(site.receiver_class):
                report(ViolationCode.UNKNOWN_CLASS,
                       f"{site_id}: unknown receiver class {site.receiver_class}", str(site_id))
            elif selector == CONSTRUCTOR_SELECTOR:
                receiver = hierarchy.classes[site.receiver_class]
                # a class without any constructor gets a default <init>
                if receiver.has_constructor() and not receiver.declares(CONSTRUCTOR_SELECTOR):
                    report(ViolationCode.UNRESOLVED_SELECTOR,
                           f"{site_id}: {site.receiver_class} has no {CONSTRUCTOR_SELECTOR} constructor",
                           str(site_id))
            elif hierarchy.lookup(site.receiver_class, selector) is None:
                report(ViolationCode.UNRESOLVED_SELECTOR,
                       f"{site_id}: {site.receiver_class} has no implementation of {selector}", str(site_id))
        elif site.dispatch is Dispatch.SELF:
            if hierarchy.lookup(cls.name, selector) is None:
                report(ViolationCode.UNRESOLVED_SELECTOR,
                       f"{site_id}: self {selector} has no implementation in {cls.name} or above", str(site_id))
        elif site.dispatch is Dispatch.SUPER:
            if hierarchy.lookup(cls.name, selector, include_self=False) is None:
                report(ViolationCode.ILLEGAL_SUPER,
                       f"{site_id}: no superclass of {cls.name} implements {selector}", str(site_id))
        elif not hierarchy.implementors(selector):
            report(ViolationCode.UNRESOLVED_SELECTOR,
                   f"{site_id}: no class implements {selector}", str(site_id))

    for ref in list(method.var_uses) + list(method.var_defs):
        owner = hierarchy.classes.get(ref.owner_class)
        if (owner is None or owner.variable(ref.var_name) is None
                or not hierarchy.is_ancestor_or_self(ref.owner_class, cls.name)):
            report(ViolationCode.UNRESOLVED_VARIABLE,
                   f"{cls.name}.{method.selector}: {ref} is not a variable of {cls.name} or its ancestors",
                   f"{cls.name}.{method.selector}")


def synthesize_default_constructors(model: ProgramModel) -> ProgramModel:
    """
    Give every class without a constructor a default `<init>` that defines
    exactly the instance variables declared in that class. Idempotent.
    """
    classes: List[ClassDef] = []
    added = 0
    for cls in model.classes:
        if cls.has_constructor() or cls.declares(CONSTRUCTOR_SELECTOR):
            classes.append(cls)
            continue
        ctor = MethodDef(
            selector=CONSTRUCTOR_SELECTOR,
            is_constructor=True,
            var_defs=tuple(VarRef(owner_class=cls.name, var_name=d.var_name) for d in cls.instance_vars),
        )
        classes.append(cls.model_copy(update={"methods": cls.methods + (ctor,)}))
        added += 1
    if added == 0:
        return model
    logger.debug(f"Synthesized {added} default constructor(s) for model {model.model_id!r}")
    return model.model_copy(update={"classes": tuple(classes)})
