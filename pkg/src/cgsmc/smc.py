"""Adaptive tempered SMC over chain graphs and parameters.

The sampler starts from exact prior draws (rejection sampling for the
graph, G-Wishart and Gaussian draws for the parameters), then alternates:
pick the next tempering exponent by a conditional-ESS bisection, reweight,
resample systematically every step, adapt the random-walk scale from the
previous step's acceptance rate, and move every particle through the
Metropolis kernel. Terminates when the exponent reaches 1.

Determinism: all randomness derives from the run seed through named
SeedSequence spawn keys (init particle i -> (0, i); kernel step t particle
i -> (1, t, i); resampling step t -> (2, t)), and skeleton normalizers are
deterministic in (skeleton, seed), so results are reproducible at a fixed
seed for any worker count.
"""

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import _jitcore
from .backend import make_norm_cache
from .errors import InitializationError, ScheduleCapError
from .graphs import chain_components, upper_to_full
from .kernels import KernelConfig, MoveStats
from .model import EPS_PD, as_data_matrix
from .priors import Hyperparams, sample_gwishart
from .state import Particle, ParticleSlot, assert_sigma_pd

PHI_TOL = 1e-6  # bisection tolerance for the tempering exponent


@dataclass
class SmcConfig:
    n_particles: int = 500
    cess_target: float = 0.9
    kernel: KernelConfig = field(default_factory=KernelConfig)
    max_init_attempts: int = 100_000
    seed: int = 0
    step_cap: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("need at least 2 particles")
        if not 0.0 < self.cess_target <= 1.0:
            raise ValueError("cess_target must lie in (0, 1]")
        if self.max_init_attempts < 1:
            raise ValueError("max_init_attempts must be positive")
        if self.step_cap < 1:
            raise ValueError("step_cap must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if not 0 <= int(self.seed) < 2 ** 63:
            raise ValueError("seed must fit in 63 bits")


@dataclass
class Population:
    """Weighted particle snapshot (arrays indexed by particle)."""

    adjacency: np.ndarray    # (N, p, p) int64
    prec: np.ndarray         # (N, p, p)
    coef: np.ndarray         # (N, p, p)
    log_weights: np.ndarray  # (N,), normalized
    log_targets: np.ndarray  # (N,), log target density at phi = 1
    log_liks: np.ndarray     # (N,)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def p(self) -> int:
        return self.adjacency.shape[1]


@dataclass
class StepTrace:
    phi: float
    ess: float
    weight_residual: float
    sigma_rw: float
    wall_time: float
    stats: MoveStats


@dataclass
class RunResult:
    """Final weighted population (pre-resample at exponent 1), the post-
    kernel population, and per-step diagnostics."""

    final: Population
    last: Population
    traces: list
    n_steps: int
    seed: int

    def trace_array(self, name: str) -> np.ndarray:
        return np.array([getattr(t, name) for t in self.traces])

    def pooled_rate(self, family: str) -> float:
        acc = sum(getattr(t.stats, f"{family}_acc") for t in self.traces)
        prop = sum(getattr(t.stats, f"{family}_prop") for t in self.traces)
        return acc / prop if prop else 0.0


class SamplerState:
    """Population arrays plus tempering bookkeeping."""

    def __init__(self, slots, hyper, cfg, S, m):
        self.slots = slots
        self.hyper = hyper
        self.cfg = cfg
        self.S = S
        self.m = m
        n = len(slots)
        self.log_weights = np.full(n, -np.log(n))
        self.phi = 0.0
        self.step = 0
        self.sigma_rw = cfg.kernel.sigma_rw
        self.traces = []
        self.init_attempts = None

    @property
    def n(self) -> int:
        return len(self.slots)

    def logliks(self) -> np.ndarray:
        return np.array([s.scal[0] for s in self.slots])

    def log_targets(self, phi: float = 1.0) -> np.ndarray:
        return np.array([s.log_target(phi) for s in self.slots])

    def snapshot(self, log_weights=None) -> Population:
        lw = self.log_weights if log_weights is None else log_weights
        return Population(
            adjacency=np.stack([s.A.copy() for s in self.slots]),
            prec=np.stack([s.prec.copy() for s in self.slots]),
            coef=np.stack([s.coef.copy() for s in self.slots]),
            log_weights=lw.copy(),
            log_targets=self.log_targets(1.0),
            log_liks=self.logliks(),
        )


def _rng_for(seed: int, key: tuple) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


def sample_prior_adjacency(p: int, alpha, rng, max_attempts: int):
    """Exact rejection draw of a chain-graph adjacency: iid edge codes with
    probabilities alpha / sum(alpha), redrawn until chain. Returns
    (adjacency, attempts used)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    probs = alpha / alpha.sum()
    n_pairs = p * (p - 1) // 2
    for attempt in range(1, max_attempts + 1):
        codes = rng.choice(4, size=n_pairs, p=probs)
        A = upper_to_full(p, codes)
        if _jitcore.is_chain_graph_codes(A):
            return A, attempt
    raise InitializationError(
        f"no chain graph found in {max_attempts} rejection attempts"
    )


def init_particles(hyper: Hyperparams, cfg: SmcConfig, S=None, m: int = 0,
                   caches=None) -> SamplerState:
    """Draw N particles exactly from the prior; uniform weights, phi = 0."""
    p = hyper.p
    if S is None:
        S = np.zeros((p, p))
    caches = caches or [make_norm_cache()]
    slots = []
    attempts = np.zeros(cfg.n_particles, dtype=np.int64)
    coef_sd = np.sqrt(hyper.coef_var)
    for i in range(cfg.n_particles):
        rng = _rng_for(cfg.seed, (0, i))
        A, attempts[i] = sample_prior_adjacency(p, hyper.alpha, rng,
                                                cfg.max_init_attempts)
        slot = ParticleSlot(p)
        slot.A[...] = A
        n_comp = _jitcore.analyze_graph(slot.A, slot.comp_of, slot.comp_ptr,
                                        slot.comp_nodes, slot.par_ptr, slot.par_nodes)
        slot.nc[0] = n_comp
        graph = chain_components(A)
        slot.prec[...] = sample_gwishart(graph, hyper, rng)
        mask = np.argwhere(A == 3)
        for (r, c) in mask:
            slot.coef[r, c] = rng.normal(hyper.coef_mean, coef_sd)
        slot.refresh(S, m, hyper)
        assert_sigma_pd(slot)
        slot.set_normalizer(hyper, cfg.kernel.n_mc_gwish, cfg.seed, caches[0])
        slots.append(slot)
    state = SamplerState(slots, hyper, cfg, S, m)
    state.init_attempts = attempts
    return state


def incremental_log_weight(particle, phi_new: float, phi_old: float) -> float:
    """log nu_new/nu_old for one particle: the prior factors cancel, leaving
    (phi_new - phi_old) times the cached log-likelihood."""
    if phi_new < phi_old:
        raise ValueError("phi must be nondecreasing")
    loglik = particle.cached_loglik if isinstance(particle, Particle) \
        else float(particle.scal[0])
    return (phi_new - phi_old) * loglik


def ess(log_weights) -> float:
    """Effective sample size 1 / sum(w^2) of normalized weights."""
    lw = np.asarray(log_weights, dtype=np.float64)
    return float(np.exp(-logsumexp(2.0 * lw)))


def _cess(logliks, log_weights, dphi) -> float:
    n = logliks.shape[0]
    logr = dphi * logliks
    num = 2.0 * logsumexp(log_weights + logr)
    den = logsumexp(log_weights + 2.0 * logr)
    return n * float(np.exp(num - den))


def next_phi(logliks_or_particles, phi_old: float, cess_target: float,
             log_weights=None) -> float:
    """Largest phi in (phi_old, 1] keeping the conditional ESS of the
    incremental weights at or above cess_target * N (bisection to 1e-6).

    Returns exactly 1.0 when the full remaining step meets the target, and
    phi_old + tolerance (with a warning) when no usable step exists.
    """
    if not phi_old < 1.0:
        raise ValueError("phi_old must be below 1")
    first = logliks_or_particles[0] if len(logliks_or_particles) else None
    if isinstance(first, (Particle, ParticleSlot)):
        logliks = np.array([pt.cached_loglik if isinstance(pt, Particle)
                            else pt.scal[0] for pt in logliks_or_particles])
    else:
        logliks = np.asarray(logliks_or_particles, dtype=np.float64)
    n = logliks.shape[0]
    if log_weights is None:
        log_weights = np.full(n, -np.log(n))
    target = cess_target * n
    if 1.0 - phi_old <= PHI_TOL:
        return 1.0
    if _cess(logliks, log_weights, 1.0 - phi_old) >= target:
        return 1.0
    lo, hi = phi_old, 1.0
    while hi - lo > PHI_TOL:
        mid = 0.5 * (lo + hi)
        if _cess(logliks, log_weights, mid - phi_old) >= target:
            lo = mid
        else:
            hi = mid
    if lo <= phi_old:
        warnings.warn("tempering schedule stalled: taking a tolerance-size step")
        return min(phi_old + PHI_TOL, 1.0)
    return lo


def systematic_ancestors(log_weights, rng) -> np.ndarray:
    """Systematic resampling: one uniform offset, N evenly spaced points."""
    w = np.exp(np.asarray(log_weights, dtype=np.float64))
    w = w / w.sum()
    n = w.shape[0]
    points = (rng.random() + np.arange(n)) / n
    cum = np.cumsum(w)
    cum[-1] = 1.0
    return np.minimum(np.searchsorted(cum, points, side="right"), n - 1)


def resample(state: SamplerState, rng) -> SamplerState:
    """Systematic resample in place; weights become uniform."""
    anc = systematic_ancestors(state.log_weights, rng)
    state.slots = [state.slots[a].copy() for a in anc]
    state.log_weights = np.full(state.n, -np.log(state.n))
    return state


def _kernel_pass(state: SamplerState, phi: float, step: int, caches) -> MoveStats:
    hyper, cfg = state.hyper, state.cfg
    kc = cfg.kernel
    run_seed = int(cfg.seed)

    def work(chunk_idx, indices):
        cache = caches[chunk_idx % len(caches)]
        counts = np.zeros(6, dtype=np.int64)
        for i in indices:
            s = state.slots[i]
            rng = _rng_for(cfg.seed, (1, step, i))
            out = _jitcore.run_kernel(
                s.A, s.prec, s.coef, s.comp_of, s.comp_ptr, s.comp_nodes,
                s.par_ptr, s.par_nodes, s.comp_ll, s.comp_ld, s.nc, s.scal,
                state.S, state.m, hyper.scale, hyper.scale_uchol, hyper.dof,
                hyper.coef_mean, hyper.coef_var, hyper.log_edge_probs, EPS_PD,
                phi, state.sigma_rw, kc.sigma_edge, kc.n_sweeps,
                kc.n_mc_gwish, run_seed, cache, rng,
            )
            counts += np.array(out, dtype=np.int64)
        return counts

    chunks = np.array_split(np.arange(state.n), max(cfg.workers, 1))
    if cfg.workers == 1:
        totals = [work(ci, chunk) for ci, chunk in enumerate(chunks)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(work, ci, chunk)
                       for ci, chunk in enumerate(chunks)]
            totals = [f.result() for f in futures]
    total = np.sum(totals, axis=0)
    return MoveStats(graph_acc=int(total[0]), graph_prop=int(total[1]),
                     prec_acc=int(total[2]), prec_prop=int(total[3]),
                     coef_acc=int(total[4]), coef_prop=int(total[5]))


def run(data, hyper: Hyperparams, cfg: SmcConfig) -> RunResult:
    """Full sampler: init, adaptive temperature loop, final populations."""
    data = as_data_matrix(data, hyper.p) if data is not None \
        else np.zeros((0, hyper.p))
    S = data.T @ data if data.size else np.zeros((hyper.p, hyper.p))
    m = data.shape[0]
    caches = [make_norm_cache() for _ in range(cfg.workers)]
    state = init_particles(hyper, cfg, S=S, m=m, caches=caches)

    final_weighted = None
    prev_stats = None
    while state.phi < 1.0:
        state.step += 1
        t = state.step
        if t > cfg.step_cap:
            raise ScheduleCapError(
                f"schedule exceeded {cfg.step_cap} steps at phi={state.phi:.6g}"
            )
        phi_new = next_phi(state.logliks(), state.phi, cfg.cess_target,
                           log_weights=state.log_weights)
        lw = state.log_weights + (phi_new - state.phi) * state.logliks()
        lw = lw - logsumexp(lw)
        residual = abs(float(logsumexp(lw)))
        step_ess = ess(lw)
        state.log_weights = lw
        if phi_new >= 1.0:
            final_weighted = state.snapshot()

        resample(state, _rng_for(cfg.seed, (2, t)))

        if prev_stats is not None:
            pooled = (prev_stats.prec_acc + prev_stats.coef_acc) / max(
                prev_stats.prec_prop + prev_stats.coef_prop, 1)
            state.sigma_rw = float(np.clip(
                state.sigma_rw * np.exp(pooled - cfg.kernel.adapt_target),
                0.01, 10.0))

        wall0 = time.perf_counter()
        stats = _kernel_pass(state, phi_new, t, caches)
        wall = time.perf_counter() - wall0

        state.traces.append(StepTrace(phi=phi_new, ess=step_ess,
                                      weight_residual=residual,
                                      sigma_rw=state.sigma_rw,
                                      wall_time=wall, stats=stats))
        state.phi = phi_new
        prev_stats = stats

    last = state.snapshot()
    return RunResult(final=final_weighted, last=last, traces=state.traces,
                     n_steps=state.step, seed=int(cfg.seed))
