"""Particle representation and cached-state plumbing.

A particle is a chain graph plus parameters. The samplers keep each
particle's state in flat arrays (adjacency, parameter matrices, component
structure, per-component likelihood terms, and five cached scalars) so the
jit kernels can mutate it in place; ``Particle`` is the user-facing film
over one such slot.
"""

from dataclasses import dataclass

import numpy as np

from . import _jitcore
from .errors import NotChainGraphError, NotPositiveDefiniteError
from .graphs import ChainGraph, as_adjacency, chain_components
from .model import EPS_PD, ModelParams, implied_covariance, is_pd
from .priors import Hyperparams


@dataclass
class Particle:
    """One joint sample with its cached log-likelihood and log-prior."""

    graph: ChainGraph
    params: ModelParams
    cached_loglik: float
    cached_logprior: float

    def log_target(self, phi: float) -> float:
        return phi * self.cached_loglik + self.cached_logprior


class ParticleSlot:
    """Mutable per-particle arrays in the layout the kernels expect.

    scal holds [loglik, gwishart unnorm, coef prior, graph prior,
    skeleton log normalizer].
    """

    __slots__ = ("A", "prec", "coef", "comp_of", "comp_ptr", "comp_nodes",
                 "par_ptr", "par_nodes", "comp_ll", "comp_ld", "nc", "scal")

    def __init__(self, p: int):
        self.A = np.zeros((p, p), dtype=np.int64)
        self.prec = np.zeros((p, p))
        self.coef = np.zeros((p, p))
        self.comp_of = np.zeros(p, dtype=np.int64)
        self.comp_ptr = np.zeros(p + 1, dtype=np.int64)
        self.comp_nodes = np.zeros(p, dtype=np.int64)
        self.par_ptr = np.zeros(p + 1, dtype=np.int64)
        self.par_nodes = np.zeros(p * p, dtype=np.int64)
        self.comp_ll = np.zeros(p)
        self.comp_ld = np.zeros(p)
        self.nc = np.zeros(1, dtype=np.int64)
        self.scal = np.zeros(5)

    @property
    def p(self) -> int:
        return self.A.shape[0]

    def refresh(self, S, m, hyper: Hyperparams) -> None:
        """Recompute structure and all caches from (A, prec, coef)."""
        n_comp = _jitcore.analyze_graph(self.A, self.comp_of, self.comp_ptr,
                                        self.comp_nodes, self.par_ptr, self.par_nodes)
        if n_comp < 0:
            raise NotChainGraphError("particle adjacency is not a chain graph")
        self.nc[0] = n_comp
        ok, ll, gw, cp, gp = _jitcore.refresh_eval(
            self.A, self.prec, self.coef, S, m, hyper.scale, hyper.dof,
            hyper.coef_mean, hyper.coef_var, hyper.log_edge_probs, EPS_PD,
            n_comp, self.comp_ptr, self.comp_nodes, self.par_ptr, self.par_nodes,
            self.comp_ll, self.comp_ld,
        )
        if not ok:
            raise NotPositiveDefiniteError("particle precision matrix is not PD")
        self.scal[0] = ll
        self.scal[1] = gw
        self.scal[2] = cp
        self.scal[3] = gp

    def set_normalizer(self, hyper: Hyperparams, n_mc: int, norm_seed: int, cache) -> None:
        self.scal[4] = _jitcore.normalizer_get(cache, self.A, hyper.dof,
                                               hyper.scale_uchol, int(n_mc),
                                               int(norm_seed))

    def log_target(self, phi: float) -> float:
        s = self.scal
        return phi * s[0] + s[1] - s[4] + s[2] + s[3]

    def copy(self) -> "ParticleSlot":
        out = ParticleSlot(self.p)
        for name in self.__slots__:
            getattr(out, name)[...] = getattr(self, name)
        return out

    def to_particle(self) -> Particle:
        graph = chain_components(self.A)
        params = ModelParams(self.coef.copy(), self.prec.copy())
        logprior = float(self.scal[1] - self.scal[4] + self.scal[2] + self.scal[3])
        return Particle(graph, params, float(self.scal[0]), logprior)


def slot_from_values(A, prec, coef, S, m, hyper: Hyperparams,
                     n_mc: int = 1000, norm_seed: int = 0, cache=None) -> ParticleSlot:
    from .backend import make_norm_cache

    A = as_adjacency(A)
    slot = ParticleSlot(A.shape[0])
    slot.A[...] = A
    slot.prec[...] = np.asarray(prec, dtype=np.float64)
    slot.coef[...] = np.asarray(coef, dtype=np.float64)
    slot.refresh(S, m, hyper)
    slot.set_normalizer(hyper, n_mc, norm_seed, cache if cache is not None
                        else make_norm_cache())
    return slot


def build_particle(A, prec, coef, data, hyper: Hyperparams,
                   n_mc: int = 1000, norm_seed: int = 0, cache=None) -> Particle:
    """Assemble a Particle with consistent caches from raw values."""
    A = as_adjacency(A)
    p = A.shape[0]
    data = np.zeros((0, p)) if data is None else np.asarray(data, dtype=np.float64)
    S = data.T @ data if data.size else np.zeros((p, p))
    slot = slot_from_values(A, prec, coef, S, data.shape[0], hyper,
                            n_mc=n_mc, norm_seed=norm_seed, cache=cache)
    return slot.to_particle()


def assert_sigma_pd(slot: ParticleSlot) -> None:
    """Guard: the implied joint covariance must be PD (congruence makes this
    automatic for a valid chain graph with PD precision)."""
    params = ModelParams(slot.coef, slot.prec)
    if not is_pd(implied_covariance(params)):
        raise NotPositiveDefiniteError("implied covariance failed the PD guard")
