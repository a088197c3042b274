"""
Strong components, condensation and longest-path leveling over simple digraphs.
"""

import logging
from typing import Any, Callable, FrozenSet, Hashable, List, Optional

import networkx as nx

from models.errors import CycleError

from .cmd_graph import SimpleDigraph

logger = logging.getLogger(__name__)

SortKey = Callable[[Hashable], Any]


def default_sort_key(node: Hashable) -> Any:
    return str(node)


def set_sort_key(members: FrozenSet[Hashable], sort_key: SortKey = default_sort_key) -> Any:
    return min(sort_key(m) for m in members)


def is_nontrivial(g: SimpleDigraph, component: FrozenSet[Hashable]) -> bool:
    """A component is cyclic when it has two or more nodes or a self-loop."""
    if len(component) > 1:
        return True
    node = next(iter(component))
    return g.has_edge(node, node)


def strong_components(g: SimpleDigraph, sort_key: SortKey = default_sort_key) -> List[FrozenSet[Hashable]]:
    """Nontrivial strongly connected components of `g`, in deterministic order."""
    components = [frozenset(c) for c in nx.strongly_connected_components(g)]
    cyclic = [c for c in components if is_nontrivial(g, c)]
    return sorted(cyclic, key=lambda c: set_sort_key(c, sort_key))


def nodes_in_cycles(g: SimpleDigraph) -> int:
    return sum(len(c) for c in nx.strongly_connected_components(g) if is_nontrivial(g, frozenset(c)))


def condense(g: SimpleDigraph) -> SimpleDigraph:
    """
    Condensation of `g`: one node per strongly connected component, each
    carrying its original nodes in the "members" attribute. Always acyclic.
    """
    return nx.condensation(g)


def _members(condensed: SimpleDigraph, node: Hashable) -> FrozenSet[Hashable]:
    members = condensed.nodes[node].get("members")
    return frozenset(members) if members is not None else frozenset([node])


def topological_levels(g: SimpleDigraph, condensed: Optional[SimpleDigraph] = None,
                       sort_key: SortKey = default_sort_key) -> List[List[FrozenSet[Hashable]]]:
    """
    Level every component of `g` by its longest path to a sink.

    Args:
        g: the dependency graph (u -> v means u depends on v)
        condensed: its condensation; computed when omitted
        sort_key: orders nodes within a level

    Returns:
        Levels bottom-up (level 0 holds the sinks), each a sorted list of
        node sets. A singleton set stands for an acyclic node.
    """
    if condensed is None:
        condensed = condense(g)
    if not nx.is_directed_acyclic_graph(condensed):
        cycle = nx.find_cycle(condensed)
        raise CycleError(u for u, _ in cycle)

    level = {}
    for node in reversed(list(nx.topological_sort(condensed))):
        successors = list(condensed.successors(node))
        level[node] = 1 + max(level[s] for s in successors) if successors else 0

    levels: List[List[FrozenSet[Hashable]]] = [[] for _ in range(max(level.values(), default=-1) + 1)]
    for node, depth in level.items():
        levels[depth].append(_members(condensed, node))
    for members in levels:
        members.sort(key=lambda c: set_sort_key(c, sort_key))
    return levels
