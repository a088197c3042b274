"""
Interaction coverage of execution traces measured on the CMD.

Criterion lists the criteria from weakest to strongest.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
from pydantic import BaseModel

from models.errors import CycleCapExceeded, CyclicCmdError, PathCapExceeded, TraceMismatch
from models.program_model import SiteId
from models.trace import TestRecord, TraceCall, TraceStore

from .cmd_graph import ClassMessageDiagram, CmdEdge, CmdNode, EdgeLabel, message_subgraph, method_node
from .graph_algos import strong_components

logger = logging.getLogger(__name__)

DEFAULT_CYCLE_CAP = 10000
DEFAULT_PATH_CAP = 10000


class Criterion(str, Enum):
    METHOD = "method"
    MESSAGE = "message"
    POLY_MESSAGE = "poly-message"
    BOUNDARY_INTERIOR = "boundary-interior"
    COMPLETE_PATH = "complete-path"


class CoverageReport(BaseModel):
    criterion: Criterion
    covered: int
    required: int
    uncovered: List[str] = []

    @property
    def ratio(self) -> float:
        return self.covered / self.required if self.required else 1.0

    @property
    def complete(self) -> bool:
        return self.covered == self.required

    def summary(self) -> str:
        return f"{self.criterion.value} {self.covered}/{self.required} {self.ratio:.4f}"

    def lines(self) -> List[str]:
        return [self.summary()] + [f"  uncovered {item}" for item in self.uncovered]


@dataclass(frozen=True)
class CoveredElements:
    methods: FrozenSet[CmdNode] = frozenset()
    edges: FrozenSet[CmdEdge] = frozenset()


def _report(criterion: Criterion, requirements: Sequence[Tuple[str, bool]]) -> CoverageReport:
    uncovered = [name for name, met in requirements if not met]
    return CoverageReport(criterion=criterion, covered=len(requirements) - len(uncovered),
                          required=len(requirements), uncovered=uncovered)


def _cycle_edges(cycle: Sequence[CmdNode]) -> FrozenSet[Tuple[CmdNode, CmdNode]]:
    return frozenset(zip(cycle, list(cycle[1:]) + [cycle[0]]))


def _describe_cycle(cycle: Sequence[CmdNode]) -> str:
    return " -> ".join(str(n) for n in list(cycle) + [cycle[0]])


class CoverageEvaluator:
    """
    Maps traces onto one CMD and evaluates criteria against it.

    A traced call with a site ordinal covers exactly the CMD edge from that
    site to the callee; without one it covers every message edge from the
    caller to the callee.
    """

    def __init__(self, cmd: ClassMessageDiagram, cycle_cap: int = DEFAULT_CYCLE_CAP,
                 path_cap: int = DEFAULT_PATH_CAP):
        self.logger = logging.getLogger(__name__)
        self.cmd = cmd
        self.cycle_cap = cycle_cap
        self.path_cap = path_cap
        self.by_pair: Dict[Tuple[CmdNode, CmdNode], List[CmdEdge]] = {}
        for edge in cmd.message_edges():
            self.by_pair.setdefault((edge.src, edge.dst), []).append(edge)
        self.graph = message_subgraph(cmd)

    # trace mapping

    def node_for(self, method: str, test_id: Optional[str] = None) -> CmdNode:
        class_name, _, selector = method.partition(".")
        node = method_node(class_name, selector)
        if not self.cmd.has_node(node):
            raise TraceMismatch(f"enter {method} (no such method node)", test_id)
        return node

    def edges_for(self, call: TraceCall, test_id: Optional[str] = None) -> List[CmdEdge]:
        pair = (self.node_for(call.caller, test_id), self.node_for(call.callee, test_id))
        edges = self.by_pair.get(pair, [])
        if call.site is not None:
            edges = [e for e in edges if e.site is not None and e.site.ordinal == call.site]
        if not edges:
            raise TraceMismatch(call, test_id)
        return edges

    def map_record(self, record: TestRecord) -> CoveredElements:
        methods = {self.node_for(frame.method, record.test_id) for frame in record.frames()}
        edges: Set[CmdEdge] = set()
        for call in record.calls():
            edges.update(self.edges_for(call, record.test_id))
        return CoveredElements(methods=frozenset(methods), edges=frozenset(edges))

    def map_traces(self, traces: Iterable[TestRecord]) -> CoveredElements:
        methods: Set[CmdNode] = set()
        edges: Set[CmdEdge] = set()
        for record in traces:
            covered = self.map_record(record)
            methods |= covered.methods
            edges |= covered.edges
        return CoveredElements(methods=frozenset(methods), edges=frozenset(edges))

    def _chain_steps(self, record: TestRecord) -> List[List[Tuple[CmdNode, Optional[int], CmdNode]]]:
        steps = []
        for chain in record.chains():
            nodes = [self.node_for(frame.method, record.test_id) for frame in chain]
            steps.append([(nodes[i], chain[i + 1].site, nodes[i + 1]) for i in range(len(chain) - 1)])
        return steps

    # criteria

    def method_coverage(self, covered: CoveredElements) -> CoverageReport:
        return _report(Criterion.METHOD, [(str(m), m in covered.methods) for m in self.cmd.method_nodes])

    def message_coverage(self, covered: CoveredElements) -> CoverageReport:
        by_site: Dict[SiteId, List[CmdEdge]] = {}
        for edge in self.cmd.edges_labeled(EdgeLabel.MESSAGE):
            by_site.setdefault(edge.site, []).append(edge)
        requirements = [(str(site), any(e in covered.edges for e in edges)) for site, edges in by_site.items()]
        return _report(Criterion.MESSAGE, requirements)

    def _poly_requirements(self, covered: CoveredElements) -> List[Tuple[str, bool]]:
        return [(str(edge), edge in covered.edges) for edge in self.cmd.message_edges()]

    def poly_message_coverage(self, covered: CoveredElements) -> CoverageReport:
        return _report(Criterion.POLY_MESSAGE, self._poly_requirements(covered))

    def simple_cycles(self) -> List[Tuple[CmdNode, ...]]:
        """Simple cycles of the message graph, each rotated to start at its smallest node."""
        cycles = []
        for cycle in nx.simple_cycles(self.graph):
            if len(cycles) >= self.cycle_cap:
                raise CycleCapExceeded(self.cycle_cap)
            start = min(range(len(cycle)), key=lambda i: self.cmd.node_key(cycle[i]))
            cycles.append(tuple(cycle[start:] + cycle[:start]))
        return sorted(cycles, key=lambda c: (len(c), [self.cmd.node_key(n) for n in c]))

    def traversals(self, record: TestRecord, cycle: Sequence[CmdNode]) -> int:
        """Complete rounds of `cycle` along the test's deepest run through it."""
        cycle_edges = _cycle_edges(cycle)
        best = 0
        for steps in self._chain_steps(record):
            run = 0
            for src, _, dst in steps:
                run = run + 1 if (src, dst) in cycle_edges else 0
                best = max(best, run)
        return best // len(cycle)

    def boundary_interior(self, traces: TraceStore) -> CoverageReport:
        covered = self.map_traces(traces)
        requirements = self._poly_requirements(covered)
        cycles = self.simple_cycles()
        if cycles:
            components = strong_components(self.graph, sort_key=self.cmd.node_key)
            for cycle in cycles:
                component = next(c for c in components if cycle[0] in c)
                counts = []
                for record in traces:
                    touched = {self.node_for(m, record.test_id) for m in record.touched_methods}
                    if touched & component:
                        counts.append(self.traversals(record, cycle))
                name = _describe_cycle(cycle)
                requirements.append((f"cycle {name} x0", any(c == 0 for c in counts)))
                requirements.append((f"cycle {name} x1", any(c == 1 for c in counts)))
                requirements.append((f"cycle {name} x2+", any(c >= 2 for c in counts)))
        return _report(Criterion.BOUNDARY_INTERIOR, requirements)

    def maximal_paths(self) -> List[Tuple[CmdEdge, ...]]:
        """Source-to-sink sequences of message edges in an acyclic message graph."""
        components = strong_components(self.graph, sort_key=self.cmd.node_key)
        if components:
            raise CyclicCmdError(components[0])

        outgoing: Dict[CmdNode, List[CmdEdge]] = {}
        for edge in self.cmd.message_edges():
            outgoing.setdefault(edge.src, []).append(edge)
        sources = [n for n in self.cmd.method_nodes if self.graph.in_degree(n) == 0 and n in outgoing]

        paths: List[Tuple[CmdEdge, ...]] = []
        stack: List[Tuple[CmdEdge, ...]] = [(e,) for s in reversed(sources) for e in reversed(outgoing[s])]
        while stack:
            path = stack.pop()
            tail = path[-1].dst
            if tail not in outgoing:
                paths.append(path)
                if len(paths) > self.path_cap:
                    raise PathCapExceeded(self.path_cap)
                continue
            stack.extend(path + (e,) for e in reversed(outgoing[tail]))
        return paths

    @staticmethod
    def _step_matches(step: Tuple[CmdNode, Optional[int], CmdNode], edge: CmdEdge) -> bool:
        src, site, dst = step
        if src != edge.src or dst != edge.dst:
            return False
        return site is None or (edge.site is not None and edge.site.ordinal == site)

    def complete_path_coverage(self, traces: TraceStore) -> CoverageReport:
        paths = self.maximal_paths()
        chains = [steps for record in traces for steps in self._chain_steps(record)]

        def covered(path: Tuple[CmdEdge, ...]) -> bool:
            for steps in chains:
                for offset in range(len(steps) - len(path) + 1):
                    if all(self._step_matches(steps[offset + i], edge) for i, edge in enumerate(path)):
                        return True
            return False

        requirements = [(" => ".join(str(e) for e in path), covered(path)) for path in paths]
        return _report(Criterion.COMPLETE_PATH, requirements)

    def evaluate(self, criterion: Criterion, traces: TraceStore) -> CoverageReport:
        if criterion is Criterion.BOUNDARY_INTERIOR:
            report = self.boundary_interior(traces)
        elif criterion is Criterion.COMPLETE_PATH:
            report = self.complete_path_coverage(traces)
        else:
            covered = self.map_traces(traces)
            report = {
                Criterion.METHOD: self.method_coverage,
                Criterion.MESSAGE: self.message_coverage,
                Criterion.POLY_MESSAGE: self.poly_message_coverage,
            }[criterion](covered)
        self.logger.info(f"{report.summary()} over {len(traces)} test(s)")
        return report

    def evaluate_all(self, traces: TraceStore) -> List[CoverageReport]:
        """All criteria in increasing strength; complete-path is skipped on cyclic message graphs."""
        reports = []
        for criterion in Criterion:
            try:
                reports.append(self.evaluate(criterion, traces))
            except CyclicCmdError as e:
                self.logger.info(f"Skipping {criterion.value}: {e}")
        return reports


def map_traces(cmd: ClassMessageDiagram, traces: Iterable[TestRecord]) -> CoveredElements:
    return CoverageEvaluator(cmd).map_traces(traces)


def method_coverage(cmd: ClassMessageDiagram, covered: CoveredElements) -> CoverageReport:
    return CoverageEvaluator(cmd).method_coverage(covered)


def message_coverage(cmd: ClassMessageDiagram, covered: CoveredElements) -> CoverageReport:
    return CoverageEvaluator(cmd).message_coverage(covered)


def poly_message_coverage(cmd: ClassMessageDiagram, covered: CoveredElements) -> CoverageReport:
    return CoverageEvaluator(cmd).poly_message_coverage(covered)


def boundary_interior(cmd: ClassMessageDiagram, traces: TraceStore,
                      cycle_cap: int = DEFAULT_CYCLE_CAP) -> CoverageReport:
    return CoverageEvaluator(cmd, cycle_cap=cycle_cap).boundary_interior(traces)


def complete_path_coverage(cmd: ClassMessageDiagram, traces: TraceStore,
                           path_cap: int = DEFAULT_PATH_CAP) -> CoverageReport:
    return CoverageEvaluator(cmd, path_cap=path_cap).complete_path_coverage(traces)


def evaluate_all(cmd: ClassMessageDiagram, traces: TraceStore, cycle_cap: int = DEFAULT_CYCLE_CAP,
                 path_cap: int = DEFAULT_PATH_CAP) -> List[CoverageReport]:
    return CoverageEvaluator(cmd, cycle_cap, path_cap).evaluate_all(traces)
