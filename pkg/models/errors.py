"""
Exception hierarchy shared by the DSL front end and the analyses.

Validation findings are not exceptions; see models.program_model.ValidationReport.
"""

from typing import Any, FrozenSet, Iterable, Optional


class CmdKitError(Exception):
    """Base class for every fault raised by cmdkit."""


class ParseError(CmdKitError):
    def __init__(self, message: str, span: Any, expected: Iterable[str] = ()):
        self.span = span
        self.expected: FrozenSet[str] = frozenset(expected)
        detail = message
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(f"{span}: {detail}")


class TraceFormatError(CmdKitError):
    def __init__(self, message: str, line: Optional[int] = None, file: str = "<traces>"):
        self.line = line
        self.file = file
        where = f"{file}:{line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ResolutionError(CmdKitError):
    """A SELF, SUPER or TYPED call site has no implementation to bind to."""

    def __init__(self, site: Any, message: str):
        self.site = site
        super().__init__(f"{site}: {message}")


class CycleError(CmdKitError):
    """A graph that must be acyclic (a condensation) contains a cycle."""

    def __init__(self, nodes: Iterable[Any]):
        self.nodes = list(nodes)
        super().__init__(f"cycle among {len(self.nodes)} node(s): {', '.join(map(str, self.nodes[:5]))}")


class CycleCapExceeded(CmdKitError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"more than {cap} simple cycles; raise --cycle-cap or CMDKIT_CYCLE_CAP")


class PathCapExceeded(CmdKitError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"more than {cap} maximal paths; raise CMDKIT_PATH_CAP")


class CyclicCmdError(CmdKitError):
    """Complete path coverage is only defined for cycle-free message graphs."""

    def __init__(self, component: Iterable[Any]):
        self.component = sorted(str(n) for n in component)
        super().__init__(f"message graph is cyclic; offending component: {{{', '.join(self.component)}}}")


class TraceMismatch(CmdKitError):
    """A traced call has no counterpart in the CMD (model and trace out of step)."""

    def __init__(self, call: Any, test_id: Optional[str] = None):
        self.call = call
        self.test_id = test_id
        prefix = f"test {test_id}: " if test_id else ""
        super().__init__(f"{prefix}no CMD edge for traced call {call}")


class StaleStore(CmdKitError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(f"trace store was captured against model {actual!r}, expected {expected!r}")
