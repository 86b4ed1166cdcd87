"""Gaussian chain-graph model: parameter masks, implied covariance, likelihood.

Parameters are a precision matrix (``prec``, symmetric positive definite,
off-diagonal entries free only on undirected edges) and a coefficient matrix
(``coef``, entry (i, j) free only when the graph has a directed edge j -> i,
i.e. code 3 at (i, j)). The observation model per data row y is

    y_t | y_pa(t) ~ Normal(coef[t, pa(t)] @ y_pa(t), inv(prec[t, t]))

over chain components t in topological order, equivalently
y ~ Normal(0, inv(I - coef) @ inv(prec) @ inv(I - coef)').
"""

from dataclasses import dataclass

import numpy as np

from . import _jitcore
from .errors import (
    AsymmetricMatrixError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    StructuralZeroError,
)
from .graphs import ChainGraph

EPS_PD = 1e-10  # Cholesky pivot floor, relative to mean diagonal
_COND_LIMIT = 1e12


@dataclass
class ModelParams:
    """Coefficient and precision matrices for a given chain graph."""

    coef: np.ndarray
    prec: np.ndarray

    def __post_init__(self):
        self.coef = np.ascontiguousarray(self.coef, dtype=np.float64)
        self.prec = np.ascontiguousarray(self.prec, dtype=np.float64)
        if self.coef.shape != self.prec.shape or self.coef.ndim != 2:
            raise ValueError("coef and prec must be square matrices of equal size")

    @property
    def p(self) -> int:
        return self.prec.shape[0]


def check_structural_zeros(params: ModelParams, graph: ChainGraph) -> None:
    """Raise StructuralZeroError if a masked entry is nonzero."""
    A = graph.adjacency
    p = graph.p
    if params.p != p:
        raise StructuralZeroError(f"parameter size {params.p} != graph size {p}")
    off = ~np.eye(p, dtype=bool)
    bad_prec = off & (A != 1) & (params.prec != 0.0)
    if np.any(bad_prec):
        i, j = np.argwhere(bad_prec)[0]
        raise StructuralZeroError(f"precision entry ({i},{j}) must be zero (code {A[i, j]})")
    bad_coef = (A != 3) & (params.coef != 0.0)
    if np.any(bad_coef):
        i, j = np.argwhere(bad_coef)[0]
        raise StructuralZeroError(f"coefficient entry ({i},{j}) must be zero (code {A[i, j]})")
    if not np.allclose(params.prec, params.prec.T, rtol=0.0, atol=0.0):
        raise StructuralZeroError("precision matrix must be exactly symmetric")


def is_pd(M, eps_pd: float = EPS_PD) -> bool:
    """True iff a Cholesky factorization succeeds with pivots above the
    relative floor. Raises AsymmetricMatrixError on asymmetric input."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise AsymmetricMatrixError(f"expected a square matrix, got shape {M.shape}")
    scale = np.max(np.abs(M))
    if scale > 0:
        rel = np.max(np.abs(M - M.T)) / scale
        if rel > 1e-8:
            raise AsymmetricMatrixError(f"relative asymmetry {rel:.3e} exceeds 1e-8")
    ok, _ = _jitcore.chol_logdet_inplace(M.copy(), eps_pd)
    return bool(ok)


def implied_covariance(params: ModelParams) -> np.ndarray:
    """Joint covariance inv(I - coef) @ inv(prec) @ inv(I - coef)'.

    Symmetrized on return; raises SingularMatrixError when I - coef is
    numerically singular and NotPositiveDefiniteError when prec is not PD.
    """
    p = params.p
    eye_minus = np.eye(p) - params.coef
    if np.linalg.cond(eye_minus) > _COND_LIMIT:
        raise SingularMatrixError("I - coef is numerically singular")
    if not is_pd(params.prec):
        raise NotPositiveDefiniteError("precision matrix is not positive definite")
    inv_ib = np.linalg.inv(eye_minus)
    sigma = inv_ib @ np.linalg.inv(params.prec) @ inv_ib.T
    return 0.5 * (sigma + sigma.T)


def as_data_matrix(data, p: int) -> np.ndarray:
    """Validate an m x p observation matrix (m may be zero)."""
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"data must be 2-d, got ndim={data.ndim}")
    if data.shape[1] != p:
        raise ValueError(f"data has {data.shape[1]} columns, expected {p}")
    if data.size and not np.all(np.isfinite(data)):
        raise ValueError("data contains non-finite entries")
    return data


def log_likelihood(data, params: ModelParams, graph: ChainGraph) -> float:
    """Sum over rows and chain components of the conditional Gaussian
    log-densities. Depends on the data only through its Gram matrix."""
    check_structural_zeros(params, graph)
    data = as_data_matrix(data, graph.p)
    S = data.T @ data
    m = data.shape[0]
    total = 0.0
    for c in range(graph.n_components):
        ok, ll, _ = _jitcore.comp_loglik(
            c, graph.comp_ptr, graph.comp_nodes, graph.par_ptr, graph.par_nodes,
            params.prec, params.coef, S, m, EPS_PD,
        )
        if not ok:
            raise NotPositiveDefiniteError(
                f"precision block of component {graph.components[c]} is not PD"
            )
        total += ll
    return float(total)
