"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(visible with pytest -s; pytest -v lists one result line per criterion).

Criterion 1 is a full inference run at production scale and takes about a
minute; everything else is seconds.
"""

import itertools
import math

import numpy as np
import pytest
from scipy.special import gammaln, multigammaln

import cgsmc
from cgsmc import _jitcore
from cgsmc.kernels import edge_move_transform
from cgsmc.model import EPS_PD
from cgsmc.priors import gwishart_log_norm_mc
from cgsmc.simulate import center_columns
from cgsmc.state import slot_from_values

from conftest import all_p3_configs, has_semi_directed_cycle_bruteforce, random_params_for

# frozen benchmark instance: independent model, p=10, m=100, data seed 358,
# sampler seed 11 (reported values are seed-dependent; thresholds are not)
DATA_SEED = 358
SMC_SEED = 11


def report(num, ok, detail):
    print(f"\n[ACCEPTANCE {num}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def independence_run():
    p, m = 10, 100
    data = center_columns(np.random.default_rng(DATA_SEED).standard_normal((m, p)))
    hyper = cgsmc.default_hyperparams(p, alpha=(3, 1, 1, 1))
    cfg = cgsmc.SmcConfig(n_particles=500, seed=SMC_SEED)
    return cgsmc.run(data, hyper, cfg)


def test_c1_independence_recovery(independence_run):
    res = independence_run
    tensor = cgsmc.edge_probabilities(res.final)
    p0 = tensor.probs[0][np.triu_indices(10, 1)]
    ok = bool((p0 > 0.7).all()) and float(np.median(p0)) > 0.85
    report(1, ok,
           f"45 edge posteriors of no-edge: min={p0.min():.3f} (>0.7), "
           f"median={np.median(p0):.3f} (>0.85), steps={res.n_steps}")


def test_c2_likelihood_oracle_equivalence():
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(100):
        p = int(rng.integers(1, 6))
        g = cgsmc.random_chain_graph(p, (1, 1, 1, 1), rng)
        params = random_params_for(g, rng)
        m = int(rng.integers(1, 6))
        data = rng.standard_normal((m, p))
        ll = cgsmc.log_likelihood(data, params, g)
        cov = cgsmc.implied_covariance(params)
        sign, logdet = np.linalg.slogdet(cov)
        sol = np.linalg.solve(cov, data.T)
        quad = np.einsum("ij,ji->i", data, sol)
        dense = float(np.sum(-0.5 * (p * np.log(2 * np.pi) + logdet + quad)))
        worst = max(worst, abs(ll - dense))
    report(2, worst < 1e-8,
           f"100 random graphs p<=5, m<=5: max |factorized - dense| = {worst:.2e} (<1e-8)")


def test_c3_validator_vs_bruteforce():
    mismatches = 0
    total = 0
    for _, A in all_p3_configs():
        total += 1
        if cgsmc.is_chain_graph(A) != (not has_semi_directed_cycle_bruteforce(A)):
            mismatches += 1
    rng = np.random.default_rng(303)
    for p in (4, 5):
        n_pairs = p * (p - 1) // 2
        for _ in range(500):
            total += 1
            A = cgsmc.upper_to_full(p, rng.integers(0, 4, size=n_pairs))
            if cgsmc.is_chain_graph(A) != (not has_semi_directed_cycle_bruteforce(A)):
                mismatches += 1
    report(3, mismatches == 0,
           f"{total} configurations (64 exhaustive p=3 + 1000 random p=4/5): "
           f"{mismatches} disagreements with brute force")


def test_c4_gwishart_normalizer_vs_closed_forms():
    worst = 0.0
    cases = 0
    for p in (2, 3, 4):
        D = np.eye(p)
        for dof in (3.0, 5.0):
            closed_empty = float(sum(gammaln(dof / 2) + (dof / 2) * np.log(2)
                                     for _ in range(p)))
            n = dof + p - 1
            closed_complete = float(0.5 * n * p * np.log(2) + multigammaln(0.5 * n, p))
            mc_empty = gwishart_log_norm_mc(np.zeros((p, p), dtype=bool), dof, D,
                                            100_000, 11 * p, 13 + int(dof))
            mc_complete = gwishart_log_norm_mc(~np.eye(p, dtype=bool), dof, D,
                                               100_000, 17 * p, 19 + int(dof))
            for err in (abs(mc_empty - closed_empty), abs(mc_complete - closed_complete)):
                worst = max(worst, err / p)
                cases += 1
    report(4, worst < 0.02,
           f"{cases} empty/complete cases p<=4, dof in {{3,5}}, n_mc=1e5: "
           f"max error {worst:.2e} nats per dimension (<0.02)")


def test_c5_prior_recovery():
    alpha = (3.0, 1.0, 1.0, 1.0)
    probs = np.asarray(alpha) / sum(alpha)
    marg = np.zeros((3, 4))
    total = 0.0
    masses = []
    for codes in itertools.product(range(4), repeat=3):
        A = cgsmc.upper_to_full(3, codes)
        if cgsmc.is_chain_graph(A):
            w = float(probs[list(codes)].prod())
            masses.append((codes, w))
            total += w
    for codes, w in masses:
        for e, c in enumerate(codes):
            marg[e, c] += w / total

    hyper = cgsmc.default_hyperparams(3, alpha=alpha)
    cfg = cgsmc.SmcConfig(n_particles=2000, seed=505)
    res = cgsmc.run(None, hyper, cfg)
    pop = res.last
    iu = np.triu_indices(3, 1)
    tvs = []
    for e, (i, j) in enumerate(zip(*iu)):
        freq = np.array([(pop.adjacency[:, i, j] == k).mean() for k in range(4)])
        tvs.append(0.5 * float(np.abs(freq - marg[e]).sum()))
    report(5, max(tvs) < 0.05,
           f"m=0, p=3, N=2000 vs exact enumeration over 64 graphs: "
           f"per-edge TV = {['%.4f' % t for t in tvs]} (each <0.05)")


def test_c6_smc_run_invariants(independence_run):
    res = independence_run
    phis = res.trace_array("phi")
    residuals = res.trace_array("weight_residual")
    rates = {f: res.pooled_rate(f) for f in ("graph", "prec", "coef")}
    checks = {
        "phi strictly increasing": bool(np.all(np.diff(phis) > 0)),
        "phi ends at exactly 1": phis[-1] == 1.0,
        "weight residual < 1e-10": bool(np.all(residuals < 1e-10)),
        "ESS = N after resample": abs(cgsmc.ess(res.last.log_weights)
                                      - res.last.n) < 1e-8,
        "pooled rates > 0.01": all(r > 0.01 for r in rates.values()),
    }
    detail = "; ".join(f"{k}: {'ok' if v else 'VIOLATED'}" for k, v in checks.items())
    report(6, all(checks.values()),
           detail + f"; rates graph={rates['graph']:.3f} "
                    f"prec={rates['prec']:.3f} coef={rates['coef']:.3f}")


def test_c7_graph_move_bookkeeping_reversibility():
    hyper = cgsmc.default_hyperparams(3, coef_mean=0.1, coef_var=0.8)
    rng = np.random.default_rng(707)
    sigma_edge = 1.1
    failures = []
    for old in range(4):
        for new in range(4):
            if old == new:
                continue
            A = np.zeros((3, 3), dtype=np.int64)
            A[0, 1] = old
            A[1, 0] = old if old < 2 else 5 - old
            prec = np.eye(3)
            coef = np.zeros((3, 3))
            if old == 1:
                prec[0, 1] = prec[1, 0] = rng.normal()
            if old == 2:
                coef[1, 0] = rng.normal()
            if old == 3:
                coef[0, 1] = rng.normal()
            fresh_prec = rng.normal() if new == 1 else None
            fresh_coef = rng.normal() if new in (2, 3) else None
            A2, prec2, coef2, lqf, lqr = edge_move_transform(
                A, prec, coef, 0, 1, new, hyper, sigma_edge,
                fresh_prec=fresh_prec, fresh_coef=fresh_coef)
            rev_prec = prec[0, 1] if old == 1 else None
            rev_coef = coef[1, 0] if old == 2 else (coef[0, 1] if old == 3 else None)
            A3, prec3, coef3, lqf_r, lqr_r = edge_move_transform(
                A2, prec2, coef2, 0, 1, old, hyper, sigma_edge,
                fresh_prec=rev_prec, fresh_coef=rev_coef)
            exact = (np.array_equal(A3, A) and np.array_equal(prec3, prec)
                     and np.array_equal(coef3, coef)
                     and lqf_r == lqr and lqr_r == lqf)
            if not exact:
                failures.append(f"{old}->{new}")
    report(7, not failures,
           "12 edge-transformation cases replayed forward/backward with "
           f"recorded draws, bitwise q-identity; failures: {failures or 'none'}")


def test_c8_conditional_posterior_fixed_graph():
    # 2-node model with one directed edge; graph move disabled; the free
    # coefficient's posterior mean must match a 1-d quadrature oracle
    rng = np.random.default_rng(88)
    m = 15
    y1 = rng.standard_normal(m)
    y2 = 0.6 * y1 + rng.standard_normal(m) * 0.9
    data = center_columns(np.column_stack([y1, y2]))
    S = data.T @ data
    delta, kappa = 3.0, 1.0

    # child precision integrates to a Gamma, leaving
    # p(b | y) propto N(b; 0, kappa) (1 + SSR(b))^(-(delta+m)/2)
    grid = np.linspace(-4, 4, 80001)
    ssr = ((data[:, 1][None, :] - grid[:, None] * data[:, 0][None, :]) ** 2).sum(axis=1)
    logp = -0.5 * grid ** 2 / kappa - 0.5 * (delta + m) * np.log(1.0 + ssr)
    logp -= logp.max()
    w = np.exp(logp)
    oracle_mean = float((grid * w).sum() / w.sum())

    hyper = cgsmc.default_hyperparams(2)
    A = cgsmc.upper_to_full(2, [2])
    slot = slot_from_values(A, np.eye(2), np.zeros((2, 2)), S, m, hyper)
    kern = np.random.default_rng(99)
    n_keep, burn = 40_000, 4_000
    bs = np.empty(n_keep)
    for t in range(n_keep + burn):
        _jitcore.sweep_prec(slot.A, slot.prec, slot.coef, slot.comp_of,
                            slot.comp_ptr, slot.comp_nodes, slot.par_ptr,
                            slot.par_nodes, slot.comp_ll, slot.comp_ld,
                            slot.scal, S, m, hyper.scale, hyper.dof, EPS_PD,
                            1.0, 0.4, kern)
        _jitcore.sweep_coef(slot.A, slot.prec, slot.coef, slot.comp_of,
                            slot.comp_ptr, slot.comp_nodes, slot.par_ptr,
                            slot.par_nodes, slot.comp_ll, slot.comp_ld,
                            slot.scal, S, m, hyper.coef_mean, hyper.coef_var,
                            1.0, 0.4, kern)
        if t >= burn:
            bs[t - burn] = slot.coef[1, 0]
    chain_mean = float(bs.mean())
    batch_means = bs.reshape(40, -1).mean(axis=1)
    mcse = float(batch_means.std(ddof=1) / math.sqrt(40))
    err = abs(chain_mean - oracle_mean)
    report(8, err < 3 * mcse,
           f"posterior mean of the free coefficient: chain {chain_mean:.5f} vs "
           f"quadrature {oracle_mean:.5f}, |diff|={err:.5f} < 3*MCSE={3 * mcse:.5f}")
