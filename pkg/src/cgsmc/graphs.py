"""Chain-graph encoding, validation, and decomposition.

A graph on p nodes is encoded by a p x p integer matrix of edge codes.
For an ordered pair (i, j) with i < j:

    0  no edge          1  undirected i -- j
    2  directed i -> j   3  directed j -> i

The lower triangle mirrors the upper one (undirected codes copied, directed
codes swapped), so the full matrix can be read for any ordered pair:
A[u, v] == 2 always means u -> v. A chain graph is such a matrix whose
graph has no semi-directed cycle; its node set then splits into chain
components (maximal undirected-connected sets) with all between-component
edges directed.
"""

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import _jitcore
from .errors import InvalidAdjacencyError, NotChainGraphError


class EdgeCode(IntEnum):
    NONE = 0
    UNDIRECTED = 1
    FORWARD = 2   # i -> j for the pair (i, j), i < j
    BACKWARD = 3  # j -> i


def mirror_code(code: int) -> int:
    """Code seen from the transposed pair: directed codes swap."""
    return code if code < 2 else 5 - code


def as_adjacency(A) -> np.ndarray:
    """Validate and return a C-contiguous int64 adjacency matrix.

    Raises InvalidAdjacencyError on bad codes, nonzero diagonal, or a lower
    triangle inconsistent with the upper one.
    """
    A = np.ascontiguousarray(A, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidAdjacencyError(f"adjacency must be square, got shape {A.shape}")
    p = A.shape[0]
    if p < 1:
        raise InvalidAdjacencyError("adjacency must have at least one node")
    if np.any((A < 0) | (A > 3)):
        raise InvalidAdjacencyError("edge codes must lie in {0,1,2,3}")
    if np.any(np.diag(A) != 0):
        raise InvalidAdjacencyError("diagonal entries must be 0")
    for i in range(p):
        for j in range(i + 1, p):
            if A[j, i] != mirror_code(A[i, j]):
                raise InvalidAdjacencyError(
                    f"entry ({j},{i})={A[j, i]} inconsistent with ({i},{j})={A[i, j]}"
                )
    return A


def upper_to_full(p: int, codes) -> np.ndarray:
    """Build the full adjacency from upper-triangle codes in row-major order."""
    codes = np.asarray(codes, dtype=np.int64).ravel()
    if codes.size != p * (p - 1) // 2:
        raise InvalidAdjacencyError(
            f"expected {p * (p - 1) // 2} upper-triangle codes, got {codes.size}"
        )
    A = np.zeros((p, p), dtype=np.int64)
    k = 0
    for i in range(p):
        for j in range(i + 1, p):
            A[i, j] = codes[k]
            A[j, i] = mirror_code(int(codes[k]))
            k += 1
    return as_adjacency(A)


def is_chain_graph(A) -> bool:
    """True iff the graph has no semi-directed cycle.

    Computed by contracting undirected components and checking the component
    digraph is acyclic (with no directed edge inside a component).
    """
    A = as_adjacency(A)
    return bool(_jitcore.is_chain_graph_codes(A))


@dataclass(frozen=True)
class ChainGraph:
    """Validated adjacency plus its chain-component decomposition.

    Components are listed in a topological order of the component digraph
    (ties broken by smallest contained node); nodes within a component and
    parent lists are ascending. Index arrays are cached in the flat layout
    the samplers consume.
    """

    adjacency: np.ndarray
    components: tuple
    parent_sets: tuple
    comp_of: np.ndarray = field(repr=False)
    comp_ptr: np.ndarray = field(repr=False)
    comp_nodes: np.ndarray = field(repr=False)
    par_ptr: np.ndarray = field(repr=False)
    par_nodes: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_components(self) -> int:
        return len(self.components)

    def undirected_mask(self) -> np.ndarray:
        return self.adjacency == 1

    def coef_mask(self) -> np.ndarray:
        """Positions (child, parent) where a coefficient entry is free."""
        return self.adjacency == 3


def chain_components(A) -> ChainGraph:
    """Decompose a chain graph; raises NotChainGraphError otherwise."""
    A = as_adjacency(A)
    p = A.shape[0]
    comp_of = np.empty(p, dtype=np.int64)
    comp_ptr = np.empty(p + 1, dtype=np.int64)
    comp_nodes = np.empty(p, dtype=np.int64)
    par_ptr = np.empty(p + 1, dtype=np.int64)
    par_nodes = np.empty(p * p, dtype=np.int64)
    n_comp = _jitcore.analyze_graph(A, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes)
    if n_comp < 0:
        raise NotChainGraphError("graph contains a semi-directed cycle")
    comps = tuple(
        tuple(int(v) for v in comp_nodes[comp_ptr[c]:comp_ptr[c + 1]])
        for c in range(n_comp)
    )
    pars = tuple(
        tuple(int(v) for v in par_nodes[par_ptr[c]:par_ptr[c + 1]])
        for c in range(n_comp)
    )
    A = A.copy()
    A.setflags(write=False)
    return ChainGraph(A, comps, pars, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes)


def parents(graph: ChainGraph, component) -> set:
    """Nodes with a directed edge into the given chain component.

    The component must be one of graph.components (as a set of nodes).
    """
    want = frozenset(int(v) for v in component)
    for c, nodes in enumerate(graph.components):
        if frozenset(nodes) == want:
            return set(graph.parent_sets[c])
    raise ValueError(f"{sorted(want)} is not a chain component of this graph")
