import numpy as np
import pytest

import cgsmc
from cgsmc.errors import InvalidAdjacencyError, NotChainGraphError

from conftest import (
    UNIVERSITY_ADJ,
    UNIVERSITY_LABELS,
    all_p3_configs,
    has_semi_directed_cycle_bruteforce,
)


def test_empty_graph_is_chain_graph():
    assert cgsmc.is_chain_graph(np.zeros((3, 3), dtype=int))


def test_directed_three_cycle_rejected():
    # 1->2, 2->3, 3->1
    A = cgsmc.upper_to_full(3, [2, 3, 2])
    assert has_semi_directed_cycle_bruteforce(A)
    assert not cgsmc.is_chain_graph(A)


def test_university_graph_is_chain_graph():
    assert cgsmc.is_chain_graph(UNIVERSITY_ADJ)


def test_adjacency_validation_errors():
    bad = np.zeros((3, 3), dtype=int)
    bad[0, 0] = 1
    with pytest.raises(InvalidAdjacencyError):
        cgsmc.is_chain_graph(bad)
    bad = np.zeros((3, 3), dtype=int)
    bad[0, 1] = 2
    bad[1, 0] = 2  # should be 3
    with pytest.raises(InvalidAdjacencyError):
        cgsmc.is_chain_graph(bad)
    bad = np.zeros((3, 3), dtype=int)
    bad[0, 1] = 4
    with pytest.raises(InvalidAdjacencyError):
        cgsmc.is_chain_graph(bad)


def test_validator_matches_bruteforce_exhaustive_p3():
    for codes, A in all_p3_configs():
        expect = not has_semi_directed_cycle_bruteforce(A)
        assert cgsmc.is_chain_graph(A) == expect, f"codes={codes}"


@pytest.mark.parametrize("p,n_draws", [(4, 500), (5, 500)])
def test_validator_matches_bruteforce_random(p, n_draws):
    rng = np.random.default_rng(100 + p)
    n_pairs = p * (p - 1) // 2
    for _ in range(n_draws):
        A = cgsmc.upper_to_full(p, rng.integers(0, 4, size=n_pairs))
        assert cgsmc.is_chain_graph(A) == (not has_semi_directed_cycle_bruteforce(A))


def test_all_zero_components_are_singletons():
    g = cgsmc.chain_components(np.zeros((4, 4), dtype=int))
    assert g.components == ((0,), (1,), (2,), (3,))


def test_two_node_undirected_single_component():
    g = cgsmc.chain_components(cgsmc.upper_to_full(2, [1]))
    assert g.components == ((0, 1),)


def test_university_components(university_graph):
    names = [tuple(UNIVERSITY_LABELS[v] for v in comp)
             for comp in university_graph.components]
    assert names == [("strat", "spend", "salar"),
                     ("top10", "tstsc", "rejr", "pacc"),
                     ("apgra",)]


def test_chain_components_rejects_cycle():
    A = cgsmc.upper_to_full(3, [2, 3, 2])
    with pytest.raises(NotChainGraphError):
        cgsmc.chain_components(A)


def test_parents_empty_graph():
    g = cgsmc.chain_components(np.zeros((3, 3), dtype=int))
    assert cgsmc.parents(g, [1]) == set()


def test_parents_university(university_graph):
    got = cgsmc.parents(university_graph, [UNIVERSITY_LABELS.index("apgra")])
    expect = {UNIVERSITY_LABELS.index(n) for n in ("salar", "tstsc", "pacc")}
    assert got == expect


def test_parents_single_directed_edge():
    g = cgsmc.chain_components(cgsmc.upper_to_full(2, [2]))
    assert cgsmc.parents(g, [1]) == {0}


def test_parents_rejects_non_component(university_graph):
    with pytest.raises(ValueError):
        cgsmc.parents(university_graph, [0, 3])


def test_partition_properties_random_graphs():
    rng = np.random.default_rng(5)
    for _ in range(50):
        g = cgsmc.random_chain_graph(6, (1, 1, 1, 1), rng)
        nodes = [v for comp in g.components for v in comp]
        assert sorted(nodes) == list(range(6))
        A = g.adjacency
        for ci, comp in enumerate(g.components):
            comp = set(comp)
            for i in comp:
                for j in range(6):
                    if A[i, j] == 1:
                        assert j in comp  # closed under undirected reachability
            # directed edges point from strictly earlier components
            for v in cgsmc.parents(g, comp):
                assert g.comp_of[v] < ci


def test_component_contraction_is_dag_kahn_peel():
    rng = np.random.default_rng(17)
    for _ in range(30):
        g = cgsmc.random_chain_graph(6, (1, 1, 1, 1), rng)
        n = g.n_components
        adj = np.zeros((n, n), dtype=bool)
        for i in range(6):
            for j in range(6):
                if g.adjacency[i, j] == 2:
                    adj[g.comp_of[i], g.comp_of[j]] = True
        remaining = set(range(n))
        while remaining:
            roots = [c for c in remaining
                     if not any(adj[o, c] for o in remaining if o != c)]
            assert roots, "component digraph has a cycle"
            remaining -= set(roots)


def test_component_order_deterministic_min_node():
    # two roots: component containing node 0 must come first
    A = np.zeros((4, 4), dtype=int)
    A[2, 3] = 2  # 2 -> 3 only directed edge
    A[3, 2] = 3
    g = cgsmc.chain_components(A)
    assert g.components[0] == (0,)
    mins = [min(c) for c in g.components]
    order_ok = all(
        g.comp_of[2] < g.comp_of[3] for _ in [0]
    )
    assert order_ok
    assert mins[0] == 0
