"""
Graphviz DOT rendering of CMDs and test strategies.

Only the DOT source is produced; rendering it needs the Graphviz binaries,
which cmdkit never calls.
"""

from typing import Union

from graphviz import Digraph

from .cmd_graph import ClassMessageDiagram, CmdNode, EdgeLabel
from .test_strategy import TestStrategy

NODE_SHAPES = {True: "box", False: "ellipse"}


def _node_id(node: CmdNode) -> str:
    return f"{node.kind.value}/{node}"


def cmd_to_dot(cmd: ClassMessageDiagram) -> str:
    dot = Digraph(name="cmd")
    for node in cmd.nodes:
        dot.node(_node_id(node), label=str(node), shape=NODE_SHAPES[node.is_method])
    for edge in cmd.edges:
        attrs = {}
        if edge.label is not EdgeLabel.MESSAGE:
            attrs["label"] = edge.label.value
        elif edge.site is not None:
            attrs["label"] = f"#{edge.site.ordinal}"
        if edge.duplicated_for is not None:
            attrs["style"] = "dashed"
        dot.edge(_node_id(edge.src), _node_id(edge.dst), **attrs)
    return dot.source


def strategy_to_dot(strategy: TestStrategy) -> str:
    """One cluster per level; stubbed edges drawn dotted between their endpoints."""
    dot = Digraph(name="strategy")
    for index, level in enumerate(strategy.levels):
        with dot.subgraph(name=f"cluster_level_{index}") as cluster:
            cluster.attr(label=f"level {index}")
            for item in level:
                for method in item.members:
                    cluster.node(_node_id(method), label=str(method), shape="box")
    for stub in strategy.stub_edges():
        dot.edge(_node_id(stub.caller), _node_id(stub.callee), label="stub", style="dotted")
    return dot.source


def export_dot(target: Union[ClassMessageDiagram, TestStrategy]) -> str:
    """Deterministic DOT text for a CMD or a test strategy."""
    if isinstance(target, TestStrategy):
        return strategy_to_dot(target)
    return cmd_to_dot(target)
