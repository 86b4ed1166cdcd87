"""Prior stack and tempered target density.

The prior factorizes as

    graph      ~ indicator(chain graph) * prod over pairs of the Dirichlet
                 marginal edge-code probability,
    precision  ~ G-Wishart(dof, scale) on the undirected skeleton,
    coef       ~ iid Normal(coef_mean, coef_var) on the free entries,

with an additional positive-definiteness indicator on the implied joint
covariance. The tempered target raises the likelihood to a power phi in
[0, 1] and keeps the prior fixed. -inf is used as the log of zero; sums
involving it stay -inf.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _jitcore
from .errors import NotPositiveDefiniteError, StructuralZeroError
from .graphs import ChainGraph, as_adjacency, chain_components, is_chain_graph
from .model import (
    ModelParams,
    as_data_matrix,
    implied_covariance,
    is_pd,
    log_likelihood,
)

NEG_INF = float("-inf")
MAX_NODES = 32  # skeleton cache packs pair bits into 8 x 62-bit words

_LCG_M1 = 2147483563
_LCG_M2 = 2147483399


def upper_cholesky(D: np.ndarray) -> np.ndarray:
    """Upper-triangular factor U with U @ U.T = D (reverse-order Cholesky)."""
    rev = np.ascontiguousarray(D[::-1, ::-1])
    L = np.linalg.cholesky(rev)
    return np.ascontiguousarray(L[::-1, ::-1])


@dataclass
class Hyperparams:
    """Prior hyperparameters for a p-node model.

    alpha: Dirichlet concentrations over the four edge codes.
    dof, scale: G-Wishart degrees of freedom (> 2) and PD scale matrix.
    coef_mean, coef_var: Gaussian prior on free coefficient entries.
    """

    alpha: np.ndarray
    dof: float = 3.0
    scale: np.ndarray = None
    coef_mean: float = 0.0
    coef_var: float = 1.0
    log_edge_probs: np.ndarray = field(init=False, repr=False)
    scale_uchol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        if self.alpha.shape != (4,) or np.any(self.alpha <= 0):
            raise ValueError("alpha must be 4 positive concentrations")
        if not self.dof > 2.0:
            raise ValueError(f"dof must exceed 2, got {self.dof}")
        if self.coef_var <= 0:
            raise ValueError(f"coef_var must be positive, got {self.coef_var}")
        self.scale = np.ascontiguousarray(self.scale, dtype=np.float64)
        if self.scale.ndim != 2 or self.scale.shape[0] != self.scale.shape[1]:
            raise ValueError("scale must be a square matrix")
        if self.scale.shape[0] > MAX_NODES:
            raise ValueError(f"at most {MAX_NODES} nodes supported, got {self.scale.shape[0]}")
        if not is_pd(self.scale):
            raise NotPositiveDefiniteError("scale matrix must be symmetric PD")
        self.log_edge_probs = np.log(self.alpha) - math.log(float(self.alpha.sum()))
        self.scale_uchol = upper_cholesky(self.scale)

    @property
    def p(self) -> int:
        return self.scale.shape[0]


def default_hyperparams(p: int, alpha=(3.0, 1.0, 1.0, 1.0), dof: float = 3.0,
                        scale=None, coef_mean: float = 0.0,
                        coef_var: float = 1.0) -> Hyperparams:
    if scale is None:
        scale = np.eye(p)
    return Hyperparams(np.asarray(alpha, dtype=np.float64), dof, scale,
                       coef_mean, coef_var)


def log_edge_prior(code: int, alpha) -> float:
    """Log marginal probability of one edge code under the Dirichlet prior.

    The Gamma-ratio marginal collapses to alpha[code] / sum(alpha).
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (4,) or np.any(alpha <= 0):
        raise ValueError("alpha must be 4 positive concentrations")
    code = int(code)
    if code not in (0, 1, 2, 3):
        raise ValueError(f"edge code must be in 0..3, got {code}")
    return float(math.log(alpha[code]) - math.log(alpha.sum()))


def log_graph_prior(A, alpha) -> float:
    """Unnormalized log prior of an adjacency: -inf unless it is a chain
    graph, else the sum of marginal edge log-probabilities over pairs."""
    A = as_adjacency(A)
    if not is_chain_graph(A):
        return NEG_INF
    alpha = np.asarray(alpha, dtype=np.float64)
    logp = np.log(alpha) - math.log(float(alpha.sum()))
    return float(_jitcore.eval_graph_prior(A, logp))


def log_gwishart_unnorm(prec, graph: ChainGraph, dof: float, scale) -> float:
    """((dof-2)/2) logdet(prec) - tr(scale @ prec)/2 on the graph's skeleton."""
    prec = np.ascontiguousarray(prec, dtype=np.float64)
    A = graph.adjacency
    off = ~np.eye(graph.p, dtype=bool)
    if np.any(off & (A != 1) & (prec != 0.0)):
        raise StructuralZeroError("precision entry outside the undirected skeleton")
    if not is_pd(prec):
        raise NotPositiveDefiniteError("precision matrix is not positive definite")
    scale = np.asarray(scale, dtype=np.float64)
    sign, logdet = np.linalg.slogdet(prec)
    return float(0.5 * (dof - 2.0) * logdet - 0.5 * np.trace(scale @ prec))


def log_coef_prior(coef, graph: ChainGraph, coef_mean: float, coef_var: float) -> float:
    """Sum of Normal(coef_mean, coef_var) log-densities over free entries
    (one per directed edge)."""
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    if np.any((graph.adjacency != 3) & (coef != 0.0)):
        raise StructuralZeroError("coefficient entry off the directed-edge mask")
    return float(_jitcore.eval_coef_prior(graph.adjacency, coef, coef_mean, coef_var))


def _skeleton_codes(skeleton) -> np.ndarray:
    """Accept a boolean edge matrix or a code matrix; return int64 codes with
    1 marking undirected edges and 0 elsewhere."""
    sk = np.asarray(skeleton)
    if sk.ndim != 2 or sk.shape[0] != sk.shape[1]:
        raise ValueError("skeleton must be a square matrix")
    if sk.dtype == bool:
        out = np.where(sk, 1, 0).astype(np.int64)
    else:
        out = np.where(sk == 1, 1, 0).astype(np.int64)
    np.fill_diagonal(out, 0)
    if not np.array_equal(out, out.T):
        raise ValueError("skeleton must be symmetric")
    return np.ascontiguousarray(out)


def gwishart_log_norm_empty(dof: float, scale) -> float:
    scale = np.asarray(scale, dtype=np.float64)
    return float(_jitcore.gwish_lognorm_empty(dof, upper_cholesky(scale)))


def gwishart_log_norm_complete(dof: float, scale) -> float:
    scale = np.asarray(scale, dtype=np.float64)
    return float(_jitcore.gwish_lognorm_complete(dof, upper_cholesky(scale)))


def gwishart_log_norm_mc(skeleton, dof: float, scale, n_mc: int,
                         seed1: int, seed2: int) -> float:
    """Raw Monte Carlo estimate, no closed-form substitution (test hook)."""
    sk = _skeleton_codes(skeleton)
    scale = np.asarray(scale, dtype=np.float64)
    return float(_jitcore.gwish_lognorm_mc(sk, dof, upper_cholesky(scale),
                                           int(n_mc), int(seed1), int(seed2)))


def log_gwishart_norm_const(skeleton, dof: float, scale, n_mc: int = 1000,
                            rng=None) -> float:
    """Log normalizing constant of the G-Wishart density on a skeleton.

    Exact closed forms are used for empty and complete skeletons; otherwise
    a Monte Carlo estimate with n_mc draws, seeded from rng.
    """
    sk = _skeleton_codes(skeleton)
    if not is_pd(np.asarray(scale, dtype=np.float64)):
        raise NotPositiveDefiniteError("scale matrix must be PD")
    if n_mc < 1:
        raise ValueError("n_mc must be at least 1")
    p = sk.shape[0]
    n_edge = int(np.sum(np.triu(sk, 1)))
    if n_edge == 0:
        return gwishart_log_norm_empty(dof, scale)
    if n_edge == p * (p - 1) // 2:
        return gwishart_log_norm_complete(dof, scale)
    if rng is None:
        rng = np.random.default_rng(0)
    s1 = int(rng.integers(1, _LCG_M1 - 1))
    s2 = int(rng.integers(1, _LCG_M2 - 1))
    return gwishart_log_norm_mc(sk, dof, scale, n_mc, s1, s2)


def log_norm_const_for(adjacency, hyper: Hyperparams, n_mc: int = 1000,
                       norm_seed: int = 0, cache=None) -> float:
    """Skeleton normalizer as the samplers see it: deterministic in
    (skeleton, norm_seed), cached per skeleton."""
    from .backend import make_norm_cache

    A = as_adjacency(adjacency)
    if cache is None:
        cache = make_norm_cache()
    return float(_jitcore.normalizer_get(cache, A, hyper.dof, hyper.scale_uchol,
                                         int(n_mc), int(norm_seed)))


def sample_gwishart(graph: ChainGraph, hyper: Hyperparams, rng,
                    sweeps: int = 200) -> np.ndarray:
    """Draw a precision matrix from the G-Wishart prior on the graph's
    undirected skeleton.

    Exact for skeleton components that are singletons or complete; other
    components use pairwise block Gibbs (one Wishart refresh per edge and
    sweep) from a diagonal start, so the draw is approximate there.
    """
    p = graph.p
    A = graph.adjacency
    D = hyper.scale
    dof = hyper.dof
    prec = np.zeros((p, p))
    for nodes in graph.components:
        t = np.asarray(nodes, dtype=np.int64)
        k = t.size
        Db = D[np.ix_(t, t)]
        if k == 1:
            prec[t[0], t[0]] = 2.0 * rng.standard_gamma(0.5 * dof) / Db[0, 0]
            continue
        edges = [(a, b) for a in range(k) for b in range(a + 1, k)
                 if A[t[a], t[b]] == 1]
        if len(edges) == k * (k - 1) // 2:
            K = _wishart_bartlett(dof + k - 1, np.linalg.inv(Db), rng)
        else:
            K = np.diag(dof / np.diag(Db))
            all_idx = np.arange(k)
            for _ in range(sweeps):
                for (a, b) in edges:
                    c_idx = np.array([a, b])
                    r_idx = np.delete(all_idx, c_idx)
                    S2 = _wishart_bartlett(
                        dof + 1.0, np.linalg.inv(Db[np.ix_(c_idx, c_idx)]), rng)
                    Kcr = K[np.ix_(c_idx, r_idx)]
                    shift = Kcr @ np.linalg.solve(K[np.ix_(r_idx, r_idx)], Kcr.T)
                    block = S2 + shift
                    block = 0.5 * (block + block.T)
                    K[np.ix_(c_idx, c_idx)] = block
        prec[np.ix_(t, t)] = 0.5 * (K + K.T)
    return prec


def _wishart_bartlett(df: float, scale_mat: np.ndarray, rng) -> np.ndarray:
    k = scale_mat.shape[0]
    L = np.linalg.cholesky(0.5 * (scale_mat + scale_mat.T))
    a = np.zeros((k, k))
    for i in range(k):
        a[i, i] = math.sqrt(2.0 * rng.standard_gamma(0.5 * (df - i)))
        for j in range(i):
            a[i, j] = rng.standard_normal()
    la = L @ a
    return la @ la.T


def log_target(phi: float, particle, data, hyper: Hyperparams,
               n_mc: int = 1000, norm_seed: int = 0, cache=None) -> float:
    """Tempered log target: phi * loglik + log prior.

    ``particle`` is anything with .graph and .params attributes, or a raw
    (adjacency, params) pair; a non-chain-graph adjacency or a failed PD
    indicator on the implied covariance yields -inf.
    """
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi must lie in [0, 1], got {phi}")
    if hasattr(particle, "graph"):
        graph = particle.graph
        params = particle.params
    else:
        adjacency, params = particle
        adjacency = as_adjacency(adjacency)
        if not is_chain_graph(adjacency):
            return NEG_INF
        graph = chain_components(adjacency)
    if not isinstance(params, ModelParams):
        params = ModelParams(*params)
    try:
        sigma = implied_covariance(params)
    except NotPositiveDefiniteError:
        return NEG_INF
    if not is_pd(sigma):
        return NEG_INF
    ll = 0.0
    data = as_data_matrix(data, graph.p) if data is not None \
        else np.zeros((0, graph.p))
    if phi > 0.0 and data.shape[0] > 0:
        ll = log_likelihood(data, params, graph)
    gw = log_gwishart_unnorm(params.prec, graph, hyper.dof, hyper.scale)
    norm = log_norm_const_for(graph.adjacency, hyper, n_mc=n_mc,
                              norm_seed=norm_seed, cache=cache)
    cp = log_coef_prior(params.coef, graph, hyper.coef_mean, hyper.coef_var)
    gp = float(_jitcore.eval_graph_prior(graph.adjacency, hyper.log_edge_probs))
    return phi * ll + gw - norm + cp + gp
