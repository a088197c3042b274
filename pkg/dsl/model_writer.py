from typing import List

from models.program_model import CallSite, ClassDef, Dispatch, MethodDef, ProgramModel, VarRef

from .tokenizer import escape_string

INDENT = "  "


def _receiver(site: CallSite) -> str:
    if site.dispatch is Dispatch.SELF:
        return "self"
    if site.dispatch is Dispatch.SUPER:
        return "super"
    if site.dispatch is Dispatch.UNTYPED:
        return "?"
    return site.receiver_class


def _varref(ref: VarRef, enclosing: str) -> str:
    # An unqualified name resolves starting at the enclosing class, which is
    # where a valid model's own-class references live.
    if ref.owner_class == enclosing:
        return ref.var_name
    return f"{ref.owner_class}.{ref.var_name}"


def _method_lines(cls: ClassDef, method: MethodDef) -> List[str]:
    header = "ctor method" if method.is_constructor else "method"
    header += f" {method.selector}"
    if method.body_fingerprint is not None:
        header += f" body {escape_string(method.body_fingerprint)}"
    stmts = [f"call {_receiver(s)}.{s.target_selector}" for s in method.call_sites]
    stmts += [f"uses {_varref(r, cls.name)}" for r in method.var_uses]
    stmts += [f"defs {_varref(r, cls.name)}" for r in method.var_defs]
    if not stmts:
        return [f"{INDENT}{header} {{ }}"]
    return [f"{INDENT}{header} {{"] + [f"{INDENT * 2}{s}" for s in stmts] + [f"{INDENT}}}"]


def _class_lines(cls: ClassDef) -> List[str]:
    header = f"class {cls.name}"
    if cls.superclass is not None:
        header += f" extends {cls.superclass}"
    if cls.is_abstract:
        header += " abstract"
    lines = [f"{header} {{"]
    for decl in cls.instance_vars:
        typed = f" : {decl.declared_type}" if decl.declared_type is not None else ""
        lines.append(f"{INDENT}var {decl.var_name}{typed}")
    for method in cls.methods:
        lines.extend(_method_lines(cls, method))
    lines.append("}")
    return lines


def serialize_model(model: ProgramModel) -> str:
    """
    Canonical `.mdl` text: classes and members in model order, variables
    before methods, one statement per line (calls, then uses, then defs), LF
    line endings. The empty model serializes to the empty string.
    """
    blocks = ["\n".join(_class_lines(cls)) + "\n" for cls in model.classes]
    return "\n".join(blocks)
