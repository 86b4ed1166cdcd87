"""Benchmark the numba backend against the pure-numpy fallback.

Runs the same three workloads under each backend in a subprocess (the
backend is fixed at import time) and prints a timing table plus a hash of
the results, which must match across backends.

Usage: python benchmarks/bench_backends.py [--inner numba|numpy]
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time


def inner(backend):
    os.environ["CGSMC_BACKEND"] = backend
    import numpy as np

    import cgsmc
    from cgsmc import _jitcore
    from cgsmc.backend import make_norm_cache
    from cgsmc.model import EPS_PD
    from cgsmc.simulate import center_columns
    from cgsmc.state import slot_from_values

    results = {}
    digest = hashlib.sha256()

    # workload 1: Metropolis kernel passes over a standing population
    p, m, n_part, n_sweeps = 8, 50, 50, 5
    rng = np.random.default_rng(1)
    data = center_columns(rng.standard_normal((m, p)))
    S = data.T @ data
    hyper = cgsmc.default_hyperparams(p)
    cache = make_norm_cache()
    slots = []
    for i in range(n_part):
        g = cgsmc.random_chain_graph(p, hyper.alpha, np.random.default_rng(100 + i))
        prec = cgsmc.sample_gwishart(g, hyper, np.random.default_rng(200 + i))
        coef = np.where(g.adjacency == 3,
                        np.random.default_rng(300 + i).normal(size=(p, p)), 0.0)
        slot = slot_from_values(g.adjacency, prec, coef, S, m, hyper, cache=cache)
        slots.append(slot)

    def kernel_pass():
        for i, s in enumerate(slots):
            _jitcore.run_kernel(
                s.A, s.prec, s.coef, s.comp_of, s.comp_ptr, s.comp_nodes,
                s.par_ptr, s.par_nodes, s.comp_ll, s.comp_ld, s.nc, s.scal,
                S, m, hyper.scale, hyper.scale_uchol, hyper.dof,
                hyper.coef_mean, hyper.coef_var, hyper.log_edge_probs, EPS_PD,
                0.7, 0.1, 1.0, n_sweeps, 500, 42, cache,
                np.random.default_rng((1, 7, i)),
            )

    kernel_pass()  # warm compile
    t0 = time.perf_counter()
    kernel_pass()
    results["kernel_pass_s"] = time.perf_counter() - t0
    for s in slots:
        digest.update(s.A.tobytes())
        digest.update(s.prec.tobytes())

    # workload 2: G-Wishart normalizer Monte Carlo on a ring skeleton
    A_ring = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        j = (i + 1) % p
        A_ring[min(i, j), max(i, j)] = 1
        A_ring[max(i, j), min(i, j)] = 1
    _jitcore.gwish_lognorm_mc(A_ring, 3.0, hyper.scale_uchol, 100, 1, 2)
    t0 = time.perf_counter()
    val = _jitcore.gwish_lognorm_mc(A_ring, 3.0, hyper.scale_uchol, 20_000, 5, 7)
    results["normalizer_s"] = time.perf_counter() - t0
    digest.update(repr(float(val)).encode())

    # workload 3: small end-to-end inference
    data3 = center_columns(np.random.default_rng(3).standard_normal((12, 3)))
    hyper3 = cgsmc.default_hyperparams(3)
    cfg3 = cgsmc.SmcConfig(n_particles=40, seed=9,
                           kernel=cgsmc.KernelConfig(n_sweeps=2))
    cgsmc.run(data3, hyper3, cfg3)  # warm compile of any remaining paths
    t0 = time.perf_counter()
    res = cgsmc.run(data3, hyper3, cfg3)
    results["end_to_end_s"] = time.perf_counter() - t0
    digest.update(res.final.adjacency.tobytes())
    digest.update(res.final.prec.tobytes())

    results["hash"] = digest.hexdigest()
    print(json.dumps(results))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--inner", choices=("numba", "numpy"))
    args = parser.parse_args()
    if args.inner:
        inner(args.inner)
        return

    rows = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ)
        env["CGSMC_BACKEND"] = backend
        r = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--inner", backend],
            capture_output=True, text=True, env=env)
        if r.returncode != 0:
            print(r.stderr, file=sys.stderr)
            raise SystemExit(f"{backend} benchmark failed")
        rows[backend] = json.loads(r.stdout.strip().splitlines()[-1])

    print(f"{'workload':<22}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for key, label in (("kernel_pass_s", "kernel pass (50x5)"),
                       ("normalizer_s", "normalizer (2e4 mc)"),
                       ("end_to_end_s", "end-to-end run")):
        a, b = rows["numba"][key], rows["numpy"][key]
        print(f"{label:<22}{a:>11.3f}s{b:>11.3f}s{b / a:>9.1f}x")
    same = rows["numba"]["hash"] == rows["numpy"]["hash"]
    print(f"results identical across backends: {same}")
    if not same:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
