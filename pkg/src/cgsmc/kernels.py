"""Metropolis-Hastings kernels leaving the tempered target invariant.

Three move families:

* precision random walk: each free precision entry (diagonal, and the
  symmetric pair of every undirected edge moved as one scalar) gets a
  Gaussian step; proposals breaking positive definiteness are rejected
  outright;
* coefficient random walk: same element-wise scheme over free entries;
* graph move: one pair is re-typed to a uniformly drawn different code,
  rejected instantly if the candidate is not a chain graph; parameter
  entries the new code requires are drawn fresh (undirected precision pair
  from Normal(0, sigma_edge^2), coefficient from the coefficient prior),
  entries no longer allowed are zeroed, and the acceptance ratio carries
  the fresh-draw density correction in both directions plus the skeleton
  normalizer ratio.

Wrappers here operate on Particle values (copy-in/copy-out); the SMC driver
calls the underlying array kernels directly.
"""

from dataclasses import dataclass

import numpy as np

from . import _jitcore
from .backend import make_norm_cache
from .model import EPS_PD
from .priors import Hyperparams
from .state import Particle, slot_from_values


@dataclass
class KernelConfig:
    """Random-walk scales and sweep counts for one kernel application."""

    sigma_rw: float = 0.1
    sigma_edge: float = 1.0
    n_sweeps: int = 10
    adapt_target: float = 0.234
    n_mc_gwish: int = 1000

    def __post_init__(self):
        if self.sigma_rw <= 0 or self.sigma_edge <= 0:
            raise ValueError("random-walk scales must be positive")
        if self.n_sweeps < 0:
            raise ValueError("n_sweeps must be nonnegative")
        if not 0.05 < self.adapt_target < 0.8:
            raise ValueError("adapt_target must lie in (0.05, 0.8)")
        if self.n_mc_gwish < 1:
            raise ValueError("n_mc_gwish must be positive")


@dataclass
class MoveStats:
    """Accepted/proposed counters per move family."""

    graph_acc: int = 0
    graph_prop: int = 0
    prec_acc: int = 0
    prec_prop: int = 0
    coef_acc: int = 0
    coef_prop: int = 0

    def __add__(self, other: "MoveStats") -> "MoveStats":
        return MoveStats(*(getattr(self, f) + getattr(other, f)
                           for f in ("graph_acc", "graph_prop", "prec_acc",
                                     "prec_prop", "coef_acc", "coef_prop")))

    def rate(self, family: str) -> float:
        acc = getattr(self, f"{family}_acc")
        prop = getattr(self, f"{family}_prop")
        return acc / prop if prop else 0.0


def _slot_for(particle: Particle, data, hyper: Hyperparams, cfg: KernelConfig,
              norm_seed: int, cache):
    p = particle.graph.p
    data = np.zeros((0, p)) if data is None else np.asarray(data, dtype=np.float64)
    S = data.T @ data if data.size else np.zeros((p, p))
    m = data.shape[0]
    slot = slot_from_values(particle.graph.adjacency, particle.params.prec,
                            particle.params.coef, S, m, hyper,
                            n_mc=cfg.n_mc_gwish, norm_seed=norm_seed, cache=cache)
    return slot, S, m


def rw_update_prec(particle: Particle, phi: float, data, hyper: Hyperparams,
                   cfg: KernelConfig, rng, norm_seed: int = 0, cache=None):
    """One element-wise random-walk pass over free precision entries."""
    cache = cache if cache is not None else make_norm_cache()
    slot, S, m = _slot_for(particle, data, hyper, cfg, norm_seed, cache)
    acc, prop = _jitcore.sweep_prec(
        slot.A, slot.prec, slot.coef, slot.comp_of, slot.comp_ptr,
        slot.comp_nodes, slot.par_ptr, slot.par_nodes, slot.comp_ll,
        slot.comp_ld, slot.scal, S, m, hyper.scale, hyper.dof, EPS_PD,
        phi, cfg.sigma_rw, rng,
    )
    return slot.to_particle(), MoveStats(prec_acc=int(acc), prec_prop=int(prop))


def rw_update_coef(particle: Particle, phi: float, data, hyper: Hyperparams,
                   cfg: KernelConfig, rng, norm_seed: int = 0, cache=None):
    """One element-wise random-walk pass over free coefficient entries."""
    cache = cache if cache is not None else make_norm_cache()
    slot, S, m = _slot_for(particle, data, hyper, cfg, norm_seed, cache)
    acc, prop = _jitcore.sweep_coef(
        slot.A, slot.prec, slot.coef, slot.comp_of, slot.comp_ptr,
        slot.comp_nodes, slot.par_ptr, slot.par_nodes, slot.comp_ll,
        slot.comp_ld, slot.scal, S, m, hyper.coef_mean, hyper.coef_var,
        phi, cfg.sigma_rw, rng,
    )
    return slot.to_particle(), MoveStats(coef_acc=int(acc), coef_prop=int(prop))


def graph_move(particle: Particle, phi: float, data, hyper: Hyperparams,
               cfg: KernelConfig, rng, norm_seed: int = 0, cache=None):
    """One joint edge re-typing move."""
    cache = cache if cache is not None else make_norm_cache()
    slot, S, m = _slot_for(particle, data, hyper, cfg, norm_seed, cache)
    acc, prop = _jitcore.move_graph(
        slot.A, slot.prec, slot.coef, slot.comp_of, slot.comp_ptr,
        slot.comp_nodes, slot.par_ptr, slot.par_nodes, slot.comp_ll,
        slot.comp_ld, slot.nc, slot.scal, S, m, hyper.scale, hyper.scale_uchol,
        hyper.dof, hyper.coef_mean, hyper.coef_var, hyper.log_edge_probs,
        EPS_PD, phi, cfg.sigma_edge, cfg.n_mc_gwish, int(norm_seed), cache, rng,
    )
    return slot.to_particle(), MoveStats(graph_acc=int(acc), graph_prop=int(prop))


def apply_kernel(particle: Particle, phi: float, data, hyper: Hyperparams,
                 cfg: KernelConfig, rng, norm_seed: int = 0, cache=None):
    """n_sweeps repetitions of [graph move; precision pass; coefficient pass]."""
    cache = cache if cache is not None else make_norm_cache()
    slot, S, m = _slot_for(particle, data, hyper, cfg, norm_seed, cache)
    counts = _jitcore.run_kernel(
        slot.A, slot.prec, slot.coef, slot.comp_of, slot.comp_ptr,
        slot.comp_nodes, slot.par_ptr, slot.par_nodes, slot.comp_ll,
        slot.comp_ld, slot.nc, slot.scal, S, m, hyper.scale, hyper.scale_uchol,
        hyper.dof, hyper.coef_mean, hyper.coef_var, hyper.log_edge_probs,
        EPS_PD, phi, cfg.sigma_rw, cfg.sigma_edge, cfg.n_sweeps,
        cfg.n_mc_gwish, int(norm_seed), cache, rng,
    )
    ag, pg, ao, po, ab, pb = (int(c) for c in counts)
    stats = MoveStats(graph_acc=ag, graph_prop=pg, prec_acc=ao, prec_prop=po,
                      coef_acc=ab, coef_prop=pb)
    return slot.to_particle(), stats


def edge_move_transform(A, prec, coef, i: int, j: int, new_code: int,
                        hyper: Hyperparams, sigma_edge: float,
                        fresh_prec=None, fresh_coef=None):
    """Deterministic core of the graph move for a chosen pair and code.

    Fresh values normally drawn inside the kernel are injected here, which
    lets tests replay a move and its reverse with recorded draws. Returns
    (candidate A, prec, coef, log q_forward, log q_reverse).
    """
    A = np.array(A, dtype=np.int64)
    prec = np.array(prec, dtype=np.float64)
    coef = np.array(coef, dtype=np.float64)
    old = int(A[i, j])
    new = int(new_code)
    if old == new:
        raise ValueError("new code must differ from the current one")
    A[i, j] = new
    A[j, i] = new if new < 2 else 5 - new
    var_edge = sigma_edge * sigma_edge
    log_q_fwd = 0.0
    log_q_rev = 0.0
    if old == 1 and new != 1:
        log_q_rev += _jitcore.log_normal_pdf(prec[i, j], 0.0, var_edge)
        prec[i, j] = 0.0
        prec[j, i] = 0.0
    if new == 1:
        w = float(fresh_prec)
        prec[i, j] = w
        prec[j, i] = w
        log_q_fwd += _jitcore.log_normal_pdf(w, 0.0, var_edge)
    if old == 2:
        log_q_rev += _jitcore.log_normal_pdf(coef[j, i], hyper.coef_mean, hyper.coef_var)
        coef[j, i] = 0.0
    if old == 3:
        log_q_rev += _jitcore.log_normal_pdf(coef[i, j], hyper.coef_mean, hyper.coef_var)
        coef[i, j] = 0.0
    if new == 2:
        b = float(fresh_coef)
        coef[j, i] = b
        log_q_fwd += _jitcore.log_normal_pdf(b, hyper.coef_mean, hyper.coef_var)
    if new == 3:
        b = float(fresh_coef)
        coef[i, j] = b
        log_q_fwd += _jitcore.log_normal_pdf(b, hyper.coef_mean, hyper.coef_var)
    return A, prec, coef, float(log_q_fwd), float(log_q_rev)
