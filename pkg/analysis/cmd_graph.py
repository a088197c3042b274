"""
Class Message Diagram construction and the graph views derived from it.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx

from models.errors import ResolutionError
from models.program_model import (
    CONSTRUCTOR_SELECTOR,
    ClassHierarchy,
    Dispatch,
    ProgramModel,
    SiteId,
    synthesize_default_constructors,
)

logger = logging.getLogger(__name__)

SimpleDigraph = nx.DiGraph


class NodeKind(str, Enum):
    METHOD = "method"
    DATA = "data"


class CmdNode(NamedTuple):
    kind: NodeKind
    class_name: str
    name: str

    def __str__(self) -> str:
        return f"{self.class_name}.{self.name}"

    @property
    def is_method(self) -> bool:
        return self.kind is NodeKind.METHOD


def method_node(class_name: str, selector: str) -> CmdNode:
    return CmdNode(NodeKind.METHOD, class_name, selector)


def data_node(class_name: str, var_name: str) -> CmdNode:
    return CmdNode(NodeKind.DATA, class_name, var_name)


class EdgeLabel(str, Enum):
    MESSAGE = "message"
    SELF = "self"
    SUPER = "super"
    INHERITANCE = "inh"
    USES = "uses"
    DEF = "def"


MESSAGE_LABELS = frozenset({EdgeLabel.MESSAGE, EdgeLabel.SELF, EdgeLabel.SUPER})


@dataclass(frozen=True)
class CmdEdge:
    src: CmdNode
    dst: CmdNode
    label: EdgeLabel
    site: Optional[SiteId] = None
    duplicated_for: Optional[str] = None

    @property
    def is_message(self) -> bool:
        return self.label in MESSAGE_LABELS

    @property
    def key(self) -> Tuple:
        return (self.src, self.dst, self.label, self.site, self.duplicated_for)

    def __str__(self) -> str:
        source = f"{self.src}#{self.site.ordinal}" if self.site is not None else str(self.src)
        text = f"{source} -> {self.dst}"
        if self.label is not EdgeLabel.MESSAGE:
            text += f" ({self.label.value})"
        elif self.duplicated_for is not None:
            text += f" (for {self.duplicated_for})"
        return text


def node_sort_key(node: CmdNode, constructors: FrozenSet[CmdNode] = frozenset()) -> Tuple:
    """Constructors first, then (class, name); methods before data on a tie."""
    is_ctor = node in constructors or (node.is_method and node.name == CONSTRUCTOR_SELECTOR)
    return (not is_ctor, node.class_name, node.name, node.kind is not NodeKind.METHOD)


@dataclass(frozen=True)
class ClassMessageDiagram:
    """
    Directed multigraph over method and data nodes.

    Nodes are kept sorted by node_key; edges keep construction order.
    """
    nodes: Tuple[CmdNode, ...] = ()
    edges: Tuple[CmdEdge, ...] = ()
    source_model_id: str = ""
    constructors: FrozenSet[CmdNode] = field(default_factory=frozenset)

    def node_key(self, node: CmdNode) -> Tuple:
        return node_sort_key(node, self.constructors)

    @property
    def method_nodes(self) -> List[CmdNode]:
        return [n for n in self.nodes if n.is_method]

    @property
    def data_nodes(self) -> List[CmdNode]:
        return [n for n in self.nodes if not n.is_method]

    @cached_property
    def node_set(self) -> FrozenSet[CmdNode]:
        return frozenset(self.nodes)

    def has_node(self, node: CmdNode) -> bool:
        return node in self.node_set

    def message_edges(self) -> List[CmdEdge]:
        return [e for e in self.edges if e.is_message]

    def edges_labeled(self, label: EdgeLabel) -> List[CmdEdge]:
        return [e for e in self.edges if e.label is label]

    def edges_between(self, src: CmdNode, dst: CmdNode) -> List[CmdEdge]:
        return [e for e in self.edges if e.src == src and e.dst == dst]

    def edge_keys(self) -> FrozenSet[Tuple]:
        return frozenset(e.key for e in self.edges)


class CmdBuilder:
    """Applies the CMD construction rules to one program model."""

    def __init__(self, model: ProgramModel):
        self.logger = logging.getLogger(__name__)
        self.model = synthesize_default_constructors(model)
        self.hierarchy = ClassHierarchy(self.model)
        self.edges: List[CmdEdge] = []

    def _resolve(self, site_id: SiteId, start: str, selector: str, include_self: bool = True) -> CmdNode:
        if not self.hierarchy.has_class(start):
            raise ResolutionError(site_id, f"unknown receiver class {start}")
        owner = self.hierarchy.lookup(start, selector, include_self=include_self)
        if owner is None:
            where = f"{start} or above" if include_self else f"above {start}"
            raise ResolutionError(site_id, f"no implementation of {selector} {where}")
        return method_node(owner, selector)

    def _add(self, *args, **kwargs) -> None:
        self.edges.append(CmdEdge(*args, **kwargs))

    def _message_edges(self, class_name: str, selector: str, site) -> None:
        src = method_node(class_name, selector)
        site_id = SiteId(class_name, selector, site.ordinal)
        target = site.target_selector

        if site.dispatch is Dispatch.SELF:
            self._add(src, self._resolve(site_id, class_name, target), EdgeLabel.SELF, site_id)
        elif site.dispatch is Dispatch.SUPER:
            self._add(src, self._resolve(site_id, class_name, target, include_self=False), EdgeLabel.SUPER, site_id)
        elif site.dispatch is Dispatch.TYPED:
            self._add(src, self._resolve(site_id, site.receiver_class, target), EdgeLabel.MESSAGE, site_id)
            if target == CONSTRUCTOR_SELECTOR:
                # instantiation names its class exactly
                return
            for subclass in self.hierarchy.descendants(site.receiver_class):
                if self.hierarchy.classes[subclass].declares(target):
                    self._add(src, method_node(subclass, target), EdgeLabel.MESSAGE, site_id,
                              duplicated_for=subclass)
        else:
            for implementor in self.hierarchy.implementors(target):
                self._add(src, method_node(implementor, target), EdgeLabel.MESSAGE, site_id)

    def build(self) -> ClassMessageDiagram:
        nodes: List[CmdNode] = []
        constructors = set()
        for cls, method in self.model.iter_methods():
            node = method_node(cls.name, method.selector)
            nodes.append(node)
            if method.is_constructor:
                constructors.add(node)
        for cls in self.model.classes:
            nodes.extend(data_node(cls.name, decl.var_name) for decl in cls.instance_vars)

        for cls, method in self.model.iter_methods():
            src = method_node(cls.name, method.selector)
            for site in method.call_sites:
                self._message_edges(cls.name, method.selector, site)
            if not method.is_constructor and method.selector != CONSTRUCTOR_SELECTOR:
                overridden = self.hierarchy.lookup(cls.name, method.selector, include_self=False)
                if overridden is not None:
                    self._add(src, method_node(overridden, method.selector), EdgeLabel.INHERITANCE)
            for ref in method.var_uses:
                self._add(src, data_node(ref.owner_class, ref.var_name), EdgeLabel.USES)
            for ref in method.var_defs:
                self._add(data_node(ref.owner_class, ref.var_name), src, EdgeLabel.DEF)

        frozen_ctors = frozenset(constructors)
        cmd = ClassMessageDiagram(
            nodes=tuple(sorted(set(nodes), key=lambda n: node_sort_key(n, frozen_ctors))),
            edges=tuple(self.edges),
            source_model_id=self.model.model_id,
            constructors=frozen_ctors,
        )
        self.logger.debug(
            f"Built CMD for {self.model.model_id!r}: {len(cmd.method_nodes)} methods, "
            f"{len(cmd.data_nodes)} data nodes, {len(cmd.edges)} edges")
        return cmd


def build_cmd(model: ProgramModel) -> ClassMessageDiagram:
    """
    Build the Class Message Diagram of `model`.

    Default constructors are synthesized first, so the model only needs to be
    valid. Raises ResolutionError when a self, super or typed call site has
    no implementation to bind to.
    """
    return CmdBuilder(model).build()


def strip_inheritance(cmd: ClassMessageDiagram) -> ClassMessageDiagram:
    return replace(cmd, edges=tuple(e for e in cmd.edges if e.label is not EdgeLabel.INHERITANCE))


def _simple_graph(nodes: Iterable[CmdNode], edges: Iterable[CmdEdge]) -> SimpleDigraph:
    g = SimpleDigraph()
    g.add_nodes_from(nodes)
    g.add_edges_from((e.src, e.dst) for e in edges)
    return g


def collapse_parallel(cmd: ClassMessageDiagram) -> SimpleDigraph:
    """Simple digraph over all CMD nodes with u->v iff some CMD edge runs u->v (self-loops kept)."""
    return _simple_graph(cmd.nodes, cmd.edges)


def transpose(g: SimpleDigraph) -> SimpleDigraph:
    return g.reverse(copy=True)


def message_subgraph(cmd: ClassMessageDiagram) -> SimpleDigraph:
    """Collapsed METHOD-only graph of message, self and super edges."""
    return _simple_graph(cmd.method_nodes, cmd.message_edges())
