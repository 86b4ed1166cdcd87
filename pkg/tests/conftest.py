import itertools

import numpy as np
import pytest

import cgsmc

# 8-variable mixed graph used across tests: three chain components
# {strat,spend,salar}, {top10,tstsc,rejr,pacc}, {apgra}, 17 edges.
UNIVERSITY_LABELS = ["strat", "spend", "salar", "top10", "tstsc", "rejr", "pacc", "apgra"]
UNIVERSITY_ADJ = np.array([
    [0, 1, 1, 2, 0, 0, 0, 0],
    [1, 0, 1, 2, 2, 2, 0, 0],
    [1, 1, 0, 0, 2, 2, 2, 2],
    [3, 3, 0, 0, 1, 0, 1, 0],
    [0, 3, 3, 1, 0, 1, 0, 2],
    [0, 3, 3, 0, 1, 0, 1, 0],
    [0, 0, 3, 1, 0, 1, 0, 2],
    [0, 0, 3, 0, 3, 0, 3, 0],
], dtype=np.int64)


@pytest.fixture
def university_graph():
    return cgsmc.chain_components(UNIVERSITY_ADJ)


def has_semi_directed_cycle_bruteforce(A) -> bool:
    """Exhaustive oracle: enumerate simple cycles over the traversal digraph
    (undirected edges both ways, directed edges forward only) and flag any
    containing at least one directed edge."""
    A = np.asarray(A)
    p = A.shape[0]

    def arcs(u):
        for v in range(p):
            code = A[u, v]
            if code == 1:
                yield v, False
            elif code == 2:
                yield v, True

    for s in range(p):
        stack = [(s, (s,), False)]
        while stack:
            u, path, any_dir = stack.pop()
            for v, is_dir in arcs(u):
                if v == s and len(path) >= 2:
                    if any_dir or is_dir:
                        return True
                elif v > s and v not in path:
                    stack.append((v, path + (v,), any_dir or is_dir))
    return False


def all_p3_configs():
    for codes in itertools.product(range(4), repeat=3):
        yield codes, cgsmc.upper_to_full(3, codes)


def random_params_for(graph, rng, coef_scale=0.8):
    """Random valid (coef, prec) for a chain graph: prec is a well-
    conditioned symmetric PD matrix on the skeleton, coef is Gaussian on
    the free entries."""
    p = graph.p
    A = graph.adjacency
    prec = np.zeros((p, p))
    for nodes in graph.components:
        t = np.asarray(nodes)
        k = t.size
        base = rng.standard_normal((k, k + 2))
        block = base @ base.T / (k + 2) + np.eye(k)
        mask = np.ones((k, k), dtype=bool)
        for a in range(k):
            for b in range(k):
                if a != b and A[t[a], t[b]] != 1:
                    mask[a, b] = False
        block = np.where(mask, block, 0.0)
        # keep PD after zeroing non-edges inside the component
        block += np.eye(k) * (np.abs(block).sum(axis=1).max())
        prec[np.ix_(t, t)] = block
    coef = np.where(A == 3, rng.normal(0.0, coef_scale, size=(p, p)), 0.0)
    return cgsmc.ModelParams(coef, prec)
