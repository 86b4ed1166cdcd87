"""Forward simulation from a chain-graph model and random graph generation."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotPositiveDefiniteError
from .graphs import ChainGraph, chain_components
from .model import ModelParams, check_structural_zeros


@dataclass
class SimSpec:
    """Ground truth for a synthetic data set."""

    graph: ChainGraph
    params: ModelParams
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        check_structural_zeros(self.params, self.graph)


def simulate_data(spec: SimSpec) -> np.ndarray:
    """Draw m rows: components in topological order, each conditionally
    Gaussian around its parents with the component precision block."""
    rng = np.random.default_rng(spec.seed)
    g = spec.graph
    m, p = spec.m, g.p
    Y = np.zeros((m, p))
    for c, nodes in enumerate(g.components):
        t = np.asarray(nodes, dtype=np.int64)
        pa = np.asarray(g.parent_sets[c], dtype=np.int64)
        block = spec.params.prec[np.ix_(t, t)]
        try:
            L = np.linalg.cholesky(block)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(
                f"precision block of component {nodes} is not PD"
            ) from exc
        Z = rng.standard_normal((m, t.size))
        noise = solve_triangular(L, Z.T, lower=True, trans="T").T
        mean = Y[:, pa] @ spec.params.coef[np.ix_(t, pa)].T if pa.size else 0.0
        Y[:, t] = mean + noise
    return Y


def random_chain_graph(p: int, alpha, rng, max_attempts: int = 100_000) -> ChainGraph:
    """Exact prior draw of a chain graph by rejection sampling."""
    from .smc import sample_prior_adjacency

    A, _ = sample_prior_adjacency(p, alpha, rng, max_attempts)
    return chain_components(A)


def center_columns(data: np.ndarray) -> np.ndarray:
    """Subtract column means (the model has no intercept)."""
    data = np.asarray(data, dtype=np.float64)
    if data.shape[0] == 0:
        return data
    return data - data.mean(axis=0)


def standardize_columns(data: np.ndarray) -> np.ndarray:
    """Center to zero mean and scale each column to unit standard deviation."""
    data = np.asarray(data, dtype=np.float64)
    centered = center_columns(data)
    sd = centered.std(axis=0)
    if np.any(sd == 0):
        raise ValueError("cannot standardize a constant column")
    return centered / sd
