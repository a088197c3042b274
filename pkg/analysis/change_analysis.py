"""
Change identification between two model versions and CMD-based impact analysis.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict

from models.program_model import ClassDef, MethodDef, ProgramModel, synthesize_default_constructors

from .cmd_graph import (
    ClassMessageDiagram,
    CmdNode,
    EdgeLabel,
    build_cmd,
    collapse_parallel,
    data_node,
    method_node,
    strip_inheritance,
    transpose,
)

logger = logging.getLogger(__name__)


class Granularity(str, Enum):
    CLASS = "class"
    VARIABLE = "variable"
    METHOD = "method"


class ChangeKind(str, Enum):
    ADDED = "added"
    DELETED = "deleted"
    MODIFIED = "modified"


_GRANULARITY_RANK = {Granularity.CLASS: 0, Granularity.VARIABLE: 1, Granularity.METHOD: 2}


class ChangeEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    granularity: Granularity
    kind: ChangeKind
    subject: str

    def __str__(self) -> str:
        return f"{self.kind.value} {self.granularity.value} {self.subject}"


@dataclass(frozen=True)
class ChangeSet:
    entries: Tuple[ChangeEntry, ...] = ()
    marked_nodes: FrozenSet[CmdNode] = frozenset()
    marked_edges: FrozenSet[Tuple] = frozenset()
    old_model_id: str = ""
    new_model_id: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def is_empty(self) -> bool:
        return not self.entries and not self.marked_edges

    def subjects(self, granularity: Optional[Granularity] = None) -> List[str]:
        return [e.subject for e in self.entries if granularity is None or e.granularity is granularity]

    def lines(self) -> List[str]:
        return [str(entry) for entry in self.entries]


@dataclass(frozen=True)
class ImpactSet:
    methods: FrozenSet[CmdNode] = frozenset()
    variables: FrozenSet[CmdNode] = frozenset()
    seed: ChangeSet = field(default_factory=ChangeSet)

    def __len__(self) -> int:
        return len(self.methods) + len(self.variables)

    @property
    def method_names(self) -> FrozenSet[str]:
        return frozenset(str(m) for m in self.methods)

    def lines(self, sort_key=None) -> List[str]:
        key = sort_key or (lambda n: (n.class_name, n.name))
        lines = [f"method {m}" for m in sorted(self.methods, key=key)]
        lines += [f"variable {v}" for v in sorted(self.variables, key=key)]
        return lines


def _method_signature(method: MethodDef) -> Tuple:
    return (
        method.is_constructor,
        method.body_fingerprint,
        method.call_sites,
        frozenset(method.var_uses),
        frozenset(method.var_defs),
    )


class ImpactAnalyzer:
    """
    Diffs two model versions and propagates the changes over the new CMD.

    Both models are completed with default constructors before comparison.
    """

    def __init__(self, old: ProgramModel, new: ProgramModel,
                 cmd_old: Optional[ClassMessageDiagram] = None,
                 cmd_new: Optional[ClassMessageDiagram] = None):
        self.logger = logging.getLogger(__name__)
        self.old = synthesize_default_constructors(old)
        self.new = synthesize_default_constructors(new)
        self.cmd_old = cmd_old or build_cmd(self.old)
        self.cmd_new = cmd_new or build_cmd(self.new)
        self._entries: Dict[Tuple[Granularity, str], ChangeEntry] = {}
        self._marked: Set[CmdNode] = set()

    def _record(self, granularity: Granularity, kind: ChangeKind, subject: str, *nodes: CmdNode) -> None:
        key = (granularity, subject)
        previous = self._entries.get(key)
        # added/deleted outrank a MODIFIED recorded through an accessor or caller
        if previous is None or (previous.kind is ChangeKind.MODIFIED and kind is not ChangeKind.MODIFIED):
            self._entries[key] = ChangeEntry(granularity=granularity, kind=kind, subject=subject)
        self._marked.update(nodes)

    def _mark_method_modified(self, node: CmdNode) -> None:
        if self.cmd_new.has_node(node):
            self._record(Granularity.METHOD, ChangeKind.MODIFIED, str(node), node)

    def _deleted_method(self, class_name: str, selector: str, report: bool = True) -> None:
        node = method_node(class_name, selector)
        if report:
            self._record(Granularity.METHOD, ChangeKind.DELETED, str(node), node)
        else:
            self._marked.add(node)
        for edge in self.cmd_old.message_edges():
            if edge.dst == node and edge.src != node:
                self._mark_method_modified(edge.src)

    def _deleted_variable(self, class_name: str, var_name: str, report: bool = True) -> None:
        node = data_node(class_name, var_name)
        if report:
            self._record(Granularity.VARIABLE, ChangeKind.DELETED, str(node), node)
        else:
            self._marked.add(node)
        self._mark_accessors(self.cmd_old, node)

    def _mark_accessors(self, cmd: ClassMessageDiagram, node: CmdNode) -> None:
        for edge in cmd.edges:
            if edge.label is EdgeLabel.USES and edge.dst == node:
                self._mark_method_modified(edge.src)
            elif edge.label is EdgeLabel.DEF and edge.src == node:
                self._mark_method_modified(edge.dst)

    def _diff_class(self, old_cls: ClassDef, new_cls: ClassDef) -> None:
        name = new_cls.name
        rebased = old_cls.superclass != new_cls.superclass
        if rebased:
            self._record(Granularity.CLASS, ChangeKind.MODIFIED, name, *(
                method_node(name, m.selector) for m in new_cls.methods))

        old_vars = {d.var_name: d for d in old_cls.instance_vars}
        new_vars = {d.var_name: d for d in new_cls.instance_vars}
        for var_name, decl in new_vars.items():
            node = data_node(name, var_name)
            if var_name not in old_vars:
                self._record(Granularity.VARIABLE, ChangeKind.ADDED, str(node), node)
            elif old_vars[var_name].declared_type != decl.declared_type:
                self._record(Granularity.VARIABLE, ChangeKind.MODIFIED, str(node), node)
                self._mark_accessors(self.cmd_new, node)
        for var_name in old_vars:
            if var_name not in new_vars:
                self._deleted_variable(name, var_name)

        old_methods = {m.selector: m for m in old_cls.methods}
        for method in new_cls.methods:
            node = method_node(name, method.selector)
            previous = old_methods.get(method.selector)
            if previous is None:
                self._record(Granularity.METHOD, ChangeKind.ADDED, str(node), node)
            elif rebased or _method_signature(previous) != _method_signature(method):
                self._record(Granularity.METHOD, ChangeKind.MODIFIED, str(node), node)
        for selector in old_methods:
            if not new_cls.declares(selector):
                self._deleted_method(name, selector)

    def diff(self) -> ChangeSet:
        self._entries.clear()
        self._marked.clear()
        old_classes = {c.name: c for c in self.old.classes}
        new_classes = {c.name: c for c in self.new.classes}

        for name, cls in new_classes.items():
            if name not in old_classes:
                nodes = [method_node(name, m.selector) for m in cls.methods]
                nodes += [data_node(name, d.var_name) for d in cls.instance_vars]
                self._record(Granularity.CLASS, ChangeKind.ADDED, name, *nodes)
            else:
                self._diff_class(old_classes[name], cls)
        for name, cls in old_classes.items():
            if name in new_classes:
                continue
            self._record(Granularity.CLASS, ChangeKind.DELETED, name)
            for method in cls.methods:
                self._deleted_method(name, method.selector, report=False)
            for decl in cls.instance_vars:
                self._deleted_variable(name, decl.var_name, report=False)

        # Edges present in only one version; the source endpoint is the dependent side.
        marked_edges = self.cmd_old.edge_keys() ^ self.cmd_new.edge_keys()
        for key in marked_edges:
            if self.cmd_new.has_node(key[0]):
                self._marked.add(key[0])

        entries = sorted(self._entries.values(),
                         key=lambda e: (_GRANULARITY_RANK[e.granularity], e.subject))
        changes = ChangeSet(
            entries=tuple(entries),
            marked_nodes=frozenset(self._marked),
            marked_edges=frozenset(marked_edges),
            old_model_id=self.old.model_id,
            new_model_id=self.new.model_id,
        )
        self.logger.info(
            f"Diff {self.old.model_id!r} -> {self.new.model_id!r}: {len(entries)} change(s), "
            f"{len(changes.marked_nodes)} marked node(s), {len(marked_edges)} marked edge(s)")
        return changes


def diff_models(old: ProgramModel, new: ProgramModel) -> ChangeSet:
    """Classify added, deleted and modified classes, variables and methods."""
    return ImpactAnalyzer(old, new).diff()


def impact(cmd_new: ClassMessageDiagram, changes: ChangeSet) -> ImpactSet:
    """
    Everything that can reach a marked node in the new CMD.

    One depth-first search from all seeds over the transposed, collapsed CMD
    without inheritance edges. Seeds absent from cmd_new are ignored.
    """
    graph = transpose(collapse_parallel(strip_inheritance(cmd_new)))
    seeds = sorted((n for n in changes.marked_nodes if n in graph), key=cmd_new.node_key)
    reached: Set[CmdNode] = set()
    stack = list(seeds)
    while stack:
        node = stack.pop()
        if node in reached:
            continue
        reached.add(node)
        stack.extend(s for s in graph.successors(node) if s not in reached)

    logger.debug(f"Impact from {len(seeds)} seed(s): {len(reached)} node(s)")
    return ImpactSet(
        methods=frozenset(n for n in reached if n.is_method),
        variables=frozenset(n for n in reached if not n.is_method),
        seed=changes,
    )


def class_dependency_graph(model: ProgramModel, cmd: Optional[ClassMessageDiagram] = None) -> nx.DiGraph:
    """
    Class-level digraph: C -> D when a method of C has a CMD edge into a node
    of D, plus superclass links in both directions. No self-loops.
    """
    cmd = cmd or build_cmd(model)
    g = nx.DiGraph()
    g.add_nodes_from(cls.name for cls in model.classes)
    for edge in cmd.edges:
        if edge.src.is_method and edge.src.class_name != edge.dst.class_name:
            g.add_edge(edge.src.class_name, edge.dst.class_name)
    for cls in model.classes:
        if cls.superclass is not None and cls.superclass in g and cls.superclass != cls.name:
            g.add_edge(cls.name, cls.superclass)
            g.add_edge(cls.superclass, cls.name)
    return g


def changed_classes(changes: ChangeSet) -> List[str]:
    names = {e.subject.split(".", 1)[0] for e in changes.entries}
    names.update(n.class_name for n in changes.marked_nodes)
    return sorted(names)


def class_level_impact(model: ProgramModel, changes: ChangeSet,
                       cmd: Optional[ClassMessageDiagram] = None) -> FrozenSet[str]:
    """Classes reachable backwards from the classes owning changed elements."""
    model = synthesize_default_constructors(model)
    graph = class_dependency_graph(model, cmd)
    seeds = [name for name in changed_classes(changes) if name in graph]
    reached: Set[str] = set(seeds)
    for seed in seeds:
        reached.update(nx.ancestors(graph, seed))
    return frozenset(reached)


def methods_in_classes(model: ProgramModel, classes: Iterable[str]) -> int:
    wanted = set(classes)
    return sum(len(cls.methods) for cls in synthesize_default_constructors(model).classes if cls.name in wanted)


def reduction_ratio(impacted_methods: int, total_methods: int) -> float:
    """1 - impacted/total, or 0 when there is nothing to compare against."""
    if total_methods <= 0:
        return 0.0
    return 1.0 - impacted_methods / total_methods
