"""
Graph metrics in the two-column shape used for experiment tables
(class diagram vs. class message diagram), plus table/TSV rendering.
"""

import logging
from typing import List, Optional, Sequence

from pydantic import BaseModel

from analysis.change_analysis import class_dependency_graph
from analysis.cmd_graph import ClassMessageDiagram, build_cmd, message_subgraph
from analysis.graph_algos import strong_components
from models.program_model import ProgramModel, synthesize_default_constructors

logger = logging.getLogger(__name__)

TABLE = "table"
TSV = "tsv"


class GraphColumn(BaseModel):
    nodes: int = 0
    data_nodes: Optional[int] = None
    edges: int = 0
    max_in_degree: int = 0
    max_out_degree: int = 0
    strong_components: int = 0
    classes_in_sccs: int = 0
    methods_in_sccs: int = 0


class GraphStats(BaseModel):
    class_level: GraphColumn
    cmd_level: GraphColumn

    @property
    def class_nodes(self) -> int:
        return self.class_level.nodes

    @property
    def class_edges(self) -> int:
        return self.class_level.edges

    @property
    def method_nodes(self) -> int:
        return self.cmd_level.nodes

    @property
    def data_nodes(self) -> int:
        return self.cmd_level.data_nodes or 0

    @property
    def cmd_edges(self) -> int:
        return self.cmd_level.edges

    @property
    def max_in_degree(self) -> int:
        return self.cmd_level.max_in_degree

    @property
    def max_out_degree(self) -> int:
        return self.cmd_level.max_out_degree

    @property
    def strong_components(self) -> int:
        return self.cmd_level.strong_components

    @property
    def classes_in_sccs(self) -> int:
        return self.cmd_level.classes_in_sccs

    @property
    def methods_in_sccs(self) -> int:
        return self.cmd_level.methods_in_sccs


ROWS = [
    ("Nodes", "nodes"),
    ("Data nodes", "data_nodes"),
    ("Edges", "edges"),
    ("Max in-degree", "max_in_degree"),
    ("Max out-degree", "max_out_degree"),
    ("Strong components", "strong_components"),
    ("Classes in strg. components", "classes_in_sccs"),
    ("Methods in strg. components", "methods_in_sccs"),
]
HEADER = ("", "Class Diagram", "Class Message Diagram")


def _max_degree(degrees) -> int:
    return max((d for _, d in degrees), default=0)


def stats(model: ProgramModel, cmd: Optional[ClassMessageDiagram] = None) -> GraphStats:
    """
    Both columns of the metrics table. The class column is measured on the
    class-dependency graph, the CMD column on the collapsed message graph;
    data nodes are only counted.
    """
    model = synthesize_default_constructors(model)
    cmd = cmd or build_cmd(model)
    methods_per_class = {cls.name: len(cls.methods) for cls in model.classes}

    classes = class_dependency_graph(model, cmd)
    class_sccs = strong_components(classes)
    sccs_classes = set().union(*class_sccs) if class_sccs else set()
    class_column = GraphColumn(
        nodes=classes.number_of_nodes(),
        edges=classes.number_of_edges(),
        max_in_degree=_max_degree(classes.in_degree()),
        max_out_degree=_max_degree(classes.out_degree()),
        strong_components=len(class_sccs),
        classes_in_sccs=len(sccs_classes),
        methods_in_sccs=sum(methods_per_class.get(name, 0) for name in sccs_classes),
    )

    messages = message_subgraph(cmd)
    method_sccs = strong_components(messages, sort_key=cmd.node_key)
    scc_methods = set().union(*method_sccs) if method_sccs else set()
    cmd_column = GraphColumn(
        nodes=messages.number_of_nodes(),
        data_nodes=len(cmd.data_nodes),
        edges=messages.number_of_edges(),
        max_in_degree=_max_degree(messages.in_degree()),
        max_out_degree=_max_degree(messages.out_degree()),
        strong_components=len(method_sccs),
        classes_in_sccs=len({m.class_name for m in scc_methods}),
        methods_in_sccs=len(scc_methods),
    )
    logger.debug(f"Stats for {model.model_id!r}: {class_column.nodes} classes, {cmd_column.nodes} methods")
    return GraphStats(class_level=class_column, cmd_level=cmd_column)


def _cell(value: Optional[int]) -> str:
    return "-" if value is None else str(value)


def render_rows(rows: Sequence[Sequence[str]], fmt: str = TABLE) -> List[str]:
    """Aligned columns (first column left, the rest right-aligned) or tab-separated lines."""
    if fmt == TSV:
        return ["\t".join(row) for row in rows]
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0]
        lines.append("  ".join(cells).rstrip())
    return lines


def stats_lines(graph_stats: GraphStats, fmt: str = TABLE) -> List[str]:
    rows = [HEADER]
    for title, field in ROWS:
        rows.append((title,
                     _cell(getattr(graph_stats.class_level, field)),
                     _cell(getattr(graph_stats.cmd_level, field))))
    return render_rows(rows, fmt)

