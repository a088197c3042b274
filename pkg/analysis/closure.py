"""
Boolean-matrix transitive closure.

Much slower than the depth-first search in change_analysis.impact; kept as an
independent reference for checking impact sets and strong components.
"""

from typing import Hashable, Iterable, List, Sequence, Set

import networkx as nx
import numpy as np


def adjacency_matrix(g: nx.DiGraph, order: Sequence[Hashable]) -> np.ndarray:
    index = {node: i for i, node in enumerate(order)}
    matrix = np.zeros((len(order), len(order)), dtype=bool)
    for u, v in g.edges():
        matrix[index[u], index[v]] = True
    return matrix


def transitive_closure(matrix: np.ndarray, reflexive: bool = True) -> np.ndarray:
    """Warshall's algorithm on a square boolean matrix."""
    closure = matrix.astype(bool, copy=True)
    if reflexive:
        closure |= np.eye(closure.shape[0], dtype=bool)
    for k in range(closure.shape[0]):
        closure |= np.outer(closure[:, k], closure[k, :])
    return closure


def reaching(g: nx.DiGraph, targets: Iterable[Hashable]) -> Set[Hashable]:
    """Nodes with a (possibly empty) forward path to any of `targets`."""
    targets = set(targets)
    order: List[Hashable] = list(g.nodes())
    wanted = [i for i, node in enumerate(order) if node in targets]
    if not wanted:
        return set()
    closure = transitive_closure(adjacency_matrix(g, order))
    rows = closure[:, wanted].any(axis=1)
    return {order[i] for i in np.flatnonzero(rows)}


def mutual_reachability_classes(g: nx.DiGraph) -> List[Set[Hashable]]:
    """Nontrivial strong components computed from the closure matrix."""
    order: List[Hashable] = list(g.nodes())
    strict = transitive_closure(adjacency_matrix(g, order), reflexive=False)
    mutual = strict & strict.T
    seen: Set[int] = set()
    classes: List[Set[Hashable]] = []
    for i in range(len(order)):
        if i in seen or not mutual[i, i]:
            continue
        members = set(np.flatnonzero(mutual[i]).tolist())
        seen.update(members)
        classes.append({order[j] for j in members})
    return classes
