"""Loop-level numeric kernels shared by both backends.

Everything here operates on plain numpy arrays and scalars so the same
source compiles under numba or runs uncompiled. Conventions:

* adjacency codes: 0 none, 1 undirected, 2 directed i->j, 3 directed j->i,
  stored redundantly in both triangles (A[j,i] mirrors A[i,j]);
* free precision entries: diagonal plus the symmetric pair of every code-1
  edge; free coefficient entries: coef[i,j] with A[i,j] == 3 (row = child,
  column = parent), so the model is y = coef @ y + noise;
* per-particle cached scalars live in a length-5 array ``scal``:
  [0] log-likelihood, [1] unnormalized G-Wishart log-density,
  [2] coefficient log-prior, [3] graph log-prior,
  [4] log normalizing constant of the current code-1 skeleton.

Random-draw discipline (fixed so replays are exact): every proposal draws
its perturbation/fresh values first; the acceptance uniform is drawn only
once the proposal is known to be feasible (chain graph + positive definite).
"""

import math

import numpy as np

from .backend import jit

LOG2PI = math.log(2.0 * math.pi)
LOG2 = math.log(2.0)

# combined multiplicative congruential generator (L'Ecuyer)
_LCG_M1 = 2147483563
_LCG_A1 = 40014
_LCG_M2 = 2147483399
_LCG_A2 = 40692


@jit
def lcg_uniform(st):
    s1 = (_LCG_A1 * st[0]) % _LCG_M1
    s2 = (_LCG_A2 * st[1]) % _LCG_M2
    st[0] = s1
    st[1] = s2
    z = (s1 - s2) % (_LCG_M1 - 1)
    if z < 1:
        z += _LCG_M1 - 1
    return z * (1.0 / _LCG_M1)


@jit
def lcg_normal(st):
    u1 = lcg_uniform(st)
    u2 = lcg_uniform(st)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@jit
def lcg_gamma(st, shape):
    # Marsaglia-Tsang; requires shape >= 1 (holds since dof > 2)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = lcg_normal(st)
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = lcg_uniform(st)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return d * v
        if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v


@jit
def log_normal_pdf(x, mean, var):
    diff = x - mean
    return -0.5 * (LOG2PI + math.log(var)) - 0.5 * diff * diff / var


# Lanczos (g = 7, 9 terms). math.lgamma is avoided because the compiled and
# interpreted implementations differ in the last ulps, which would break
# bit-identical results across backends. Valid for x > 0.5; callers only
# pass arguments above 1.
_LZ0 = 0.99999999999980993
_LZ1 = 676.5203681218851
_LZ2 = -1259.1392167224028
_LZ3 = 771.32342877765313
_LZ4 = -176.61502916214059
_LZ5 = 12.507343278686905
_LZ6 = -0.13857109526572012
_LZ7 = 9.9843695780195716e-6
_LZ8 = 1.5056327351493116e-7


@jit
def lgamma_pos(x):
    z = x - 1.0
    a = (_LZ0 + _LZ1 / (z + 1.0) + _LZ2 / (z + 2.0) + _LZ3 / (z + 3.0)
         + _LZ4 / (z + 4.0) + _LZ5 / (z + 5.0) + _LZ6 / (z + 6.0)
         + _LZ7 / (z + 7.0) + _LZ8 / (z + 8.0))
    t = z + 7.5
    return 0.5 * LOG2PI + (z + 0.5) * math.log(t) - t + math.log(a)


@jit
def mirror_code(code):
    if code < 2:
        return code
    return 5 - code


@jit
def analyze_graph(A, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes):
    """Partition into chain components and order them topologically.

    Fills the structure arrays and returns the component count, or -1 if
    the graph has a semi-directed cycle. Components are numbered in a
    topological order of the component digraph, ties broken by smallest
    contained node; nodes and parent lists are ascending.
    """
    p = A.shape[0]
    raw = np.full(p, -1, np.int64)
    stack = np.empty(p, np.int64)
    n_comp = 0
    for seed in range(p):
        if raw[seed] >= 0:
            continue
        raw[seed] = n_comp
        stack[0] = seed
        top = 1
        while top > 0:
            top -= 1
            v = stack[top]
            for w in range(p):
                if A[v, w] == 1 and raw[w] < 0:
                    raw[w] = n_comp
                    stack[top] = w
                    top += 1
        n_comp += 1

    # a directed edge inside an undirected component closes a cycle
    for i in range(p):
        for j in range(p):
            if A[i, j] == 2 and raw[i] == raw[j]:
                return -1

    adj = np.zeros((n_comp, n_comp), np.int64)
    indeg = np.zeros(n_comp, np.int64)
    for i in range(p):
        for j in range(p):
            if A[i, j] == 2:
                ci = raw[i]
                cj = raw[j]
                if adj[ci, cj] == 0:
                    adj[ci, cj] = 1
                    indeg[cj] += 1

    # Kahn peel; raw ids are ordered by smallest contained node already
    order = np.empty(n_comp, np.int64)
    used = np.zeros(n_comp, np.int64)
    for pos in range(n_comp):
        pick = -1
        for c in range(n_comp):
            if used[c] == 0 and indeg[c] == 0:
                pick = c
                break
        if pick < 0:
            return -1
        used[pick] = 1
        order[pos] = pick
        for c2 in range(n_comp):
            if adj[pick, c2] == 1:
                indeg[c2] -= 1

    newid = np.empty(n_comp, np.int64)
    for pos in range(n_comp):
        newid[order[pos]] = pos
    for v in range(p):
        comp_of[v] = newid[raw[v]]

    sizes = np.zeros(n_comp, np.int64)
    for v in range(p):
        sizes[comp_of[v]] += 1
    comp_ptr[0] = 0
    for c in range(n_comp):
        comp_ptr[c + 1] = comp_ptr[c] + sizes[c]
    cursor = np.zeros(n_comp, np.int64)
    for v in range(p):
        c = comp_of[v]
        comp_nodes[comp_ptr[c] + cursor[c]] = v
        cursor[c] += 1

    par_ptr[0] = 0
    pos = 0
    for c in range(n_comp):
        for v in range(p):
            if comp_of[v] == c:
                continue
            found = False
            for uu in range(comp_ptr[c], comp_ptr[c + 1]):
                if A[comp_nodes[uu], v] == 3:
                    found = True
                    break
            if found:
                par_nodes[pos] = v
                pos += 1
        par_ptr[c + 1] = pos
    return n_comp


@jit
def is_chain_graph_codes(A):
    p = A.shape[0]
    comp_of = np.empty(p, np.int64)
    comp_ptr = np.empty(p + 1, np.int64)
    comp_nodes = np.empty(p, np.int64)
    par_ptr = np.empty(p + 1, np.int64)
    par_nodes = np.empty(p * p, np.int64)
    return analyze_graph(A, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes) >= 0


@jit
def chol_logdet_inplace(mat, eps_rel):
    """Lower Cholesky of a small symmetric block, overwriting it.

    Pivots must exceed eps_rel * mean(diagonal). Returns (ok, log det).
    """
    k = mat.shape[0]
    tr = 0.0
    for c in range(k):
        tr += mat[c, c]
    thr = eps_rel * tr / k if tr > 0.0 else 0.0
    logdet = 0.0
    for c in range(k):
        acc = mat[c, c]
        for s in range(c):
            acc -= mat[c, s] * mat[c, s]
        if acc <= thr:
            return False, 0.0
        mat[c, c] = math.sqrt(acc)
        logdet += math.log(acc)
        for r in range(c + 1, k):
            acc2 = mat[r, c]
            for s in range(c):
                acc2 -= mat[r, s] * mat[c, s]
            mat[r, c] = acc2 / mat[c, c]
    return True, logdet


@jit
def comp_chol_logdet(c, comp_ptr, comp_nodes, omega, eps_pd):
    t0 = comp_ptr[c]
    k = comp_ptr[c + 1] - t0
    block = np.empty((k, k))
    for a in range(k):
        na = comp_nodes[t0 + a]
        for b in range(k):
            block[a, b] = omega[na, comp_nodes[t0 + b]]
    return chol_logdet_inplace(block, eps_pd)


@jit
def comp_quad(c, comp_ptr, comp_nodes, par_ptr, par_nodes, omega, coef, S):
    """tr(Omega_block @ residual scatter) for one component.

    The scatter is S_tt - C S_qt - (C S_qt)' + C S_qq C' with C the
    child-by-parent coefficient block; S is the data Gram matrix.
    """
    t0 = comp_ptr[c]
    k = comp_ptr[c + 1] - t0
    q0 = par_ptr[c]
    r = par_ptr[c + 1] - q0
    cs = np.empty((k, r))
    for a in range(k):
        na = comp_nodes[t0 + a]
        for u in range(r):
            qu = par_nodes[q0 + u]
            acc = 0.0
            for v in range(r):
                qv = par_nodes[q0 + v]
                acc += coef[na, qv] * S[qv, qu]
            cs[a, u] = acc
    quad = 0.0
    for a in range(k):
        na = comp_nodes[t0 + a]
        for b in range(k):
            nb = comp_nodes[t0 + b]
            acc = S[na, nb]
            for u in range(r):
                qu = par_nodes[q0 + u]
                acc -= coef[na, qu] * S[qu, nb]
                acc -= S[na, qu] * coef[nb, qu]
                acc += cs[a, u] * coef[nb, qu]
            quad += omega[na, nb] * acc
    return quad


@jit
def comp_loglik(c, comp_ptr, comp_nodes, par_ptr, par_nodes, omega, coef, S, m, eps_pd):
    ok, logdet = comp_chol_logdet(c, comp_ptr, comp_nodes, omega, eps_pd)
    if not ok:
        return False, 0.0, 0.0
    k = comp_ptr[c + 1] - comp_ptr[c]
    quad = comp_quad(c, comp_ptr, comp_nodes, par_ptr, par_nodes, omega, coef, S)
    ll = 0.5 * m * (logdet - k * LOG2PI) - 0.5 * quad
    return True, ll, logdet


@jit
def eval_coef_prior(A, coef, coef_mean, coef_var):
    p = A.shape[0]
    out = 0.0
    for i in range(p):
        for j in range(p):
            if A[i, j] == 3:
                out += log_normal_pdf(coef[i, j], coef_mean, coef_var)
    return out


@jit
def eval_graph_prior(A, logp_edge):
    p = A.shape[0]
    out = 0.0
    for i in range(p):
        for j in range(i + 1, p):
            out += logp_edge[A[i, j]]
    return out


@jit
def trace_dot(D, omega):
    p = D.shape[0]
    out = 0.0
    for i in range(p):
        for j in range(p):
            out += D[i, j] * omega[i, j]
    return out


@jit
def refresh_eval(A, omega, coef, S, m, D, delta, coef_mean, coef_var, logp_edge,
                 eps_pd, n_comp, comp_ptr, comp_nodes, par_ptr, par_nodes,
                 comp_ll, comp_ld):
    ll = 0.0
    sum_logdet = 0.0
    for c in range(n_comp):
        ok, llc, ldc = comp_loglik(c, comp_ptr, comp_nodes, par_ptr, par_nodes,
                                   omega, coef, S, m, eps_pd)
        if not ok:
            return False, 0.0, 0.0, 0.0, 0.0
        comp_ll[c] = llc
        comp_ld[c] = ldc
        ll += llc
        sum_logdet += ldc
    gw = 0.5 * (delta - 2.0) * sum_logdet - 0.5 * trace_dot(D, omega)
    cp = eval_coef_prior(A, coef, coef_mean, coef_var)
    gp = eval_graph_prior(A, logp_edge)
    return True, ll, gw, cp, gp


# ---------------------------------------------------------------------------
# G-Wishart normalizing constant (Monte Carlo over free Cholesky elements)
# ---------------------------------------------------------------------------

@jit
def pack_skeleton_key(A, words):
    # 62 usable bits per word keeps values positive in int64; p <= 32
    for w in range(8):
        words[w] = 0
    p = A.shape[0]
    idx = 0
    for i in range(p):
        for j in range(i + 1, p):
            if A[i, j] == 1:
                words[idx // 62] |= 1 << (idx % 62)
            idx += 1


@jit
def seeds_from_words(words, run_seed):
    s1 = 12345
    s2 = 67890
    rs = run_seed
    for chunk in range(3):
        v = (rs >> (31 * chunk)) & 0x7FFFFFFF
        s1 = (_LCG_A1 * s1 + v + 1) % _LCG_M1
        s2 = (_LCG_A2 * s2 + v + 1) % _LCG_M2
    for w in range(8):
        hi = words[w] >> 31
        lo = words[w] & 0x7FFFFFFF
        s1 = (_LCG_A1 * s1 + hi + 1) % _LCG_M1
        s2 = (_LCG_A2 * s2 + lo + 1) % _LCG_M2
    s1 = s1 % (_LCG_M1 - 1) + 1
    s2 = s2 % (_LCG_M2 - 1) + 1
    return s1, s2


@jit
def gwish_lognorm_mc(A, delta, tchol, n_mc, seed1, seed2):
    """Monte Carlo log normalizing constant of the G-Wishart density
    |K|^((delta-2)/2) exp(-tr(K D)/2) restricted to the code-1 skeleton.

    tchol is the upper-triangular factor with tchol @ tchol.T = D. Free
    Cholesky elements of K are standard draws; entries forced by the zero
    pattern are completed row by row and contribute exp(-psi^2/2) factors
    estimated by averaging.
    """
    p = A.shape[0]
    st = np.empty(2, np.int64)
    st[0] = seed1
    st[1] = seed2

    nu = np.zeros(p, np.int64)
    n_edge = 0
    for i in range(p):
        for j in range(i + 1, p):
            if A[i, j] == 1:
                nu[i] += 1
                n_edge += 1

    pref = 0.0
    for i in range(p):
        a = delta + nu[i]
        pref += 0.5 * a * LOG2 + lgamma_pos(0.5 * a) - a * math.log(tchol[i, i])
    for i in range(p):
        for j in range(i + 1, p):
            if A[i, j] == 1:
                pref -= math.log(tchol[j, j])
    pref += 0.5 * n_edge * LOG2PI

    n_free = p * (p - 1) // 2 - n_edge
    exps = np.empty(n_mc)
    phi = np.zeros((p, p))
    for d in range(n_mc):
        acc = 0.0
        for i in range(p):
            a = delta + nu[i]
            chi2 = 2.0 * lcg_gamma(st, 0.5 * a)
            phi[i, i] = math.sqrt(chi2) / tchol[i, i]
            for j in range(i + 1, p):
                if A[i, j] == 1:
                    psi = lcg_normal(st)
                    s = 0.0
                    for k in range(i, j):
                        s += phi[i, k] * tchol[k, j]
                    phi[i, j] = (psi - s) / tchol[j, j]
                else:
                    s2 = 0.0
                    for l in range(i):
                        s2 += phi[l, i] * phi[l, j]
                    phi[i, j] = -s2 / phi[i, i]
                    psi = 0.0
                    for k in range(i, j + 1):
                        psi += phi[i, k] * tchol[k, j]
                    acc += psi * psi
        exps[d] = -0.5 * acc

    if n_free == 0:
        return pref
    mx = exps[0]
    for d in range(1, n_mc):
        if exps[d] > mx:
            mx = exps[d]
    tot = 0.0
    for d in range(n_mc):
        tot += math.exp(exps[d] - mx)
    return pref + mx + math.log(tot / n_mc)


@jit
def gwish_lognorm_empty(delta, tchol):
    # skeleton with no edges: product of univariate Gamma normalizers
    p = tchol.shape[0]
    out = 0.0
    for i in range(p):
        dii = 0.0
        for k in range(i, p):
            dii += tchol[i, k] * tchol[i, k]
        out += lgamma_pos(0.5 * delta) + 0.5 * delta * (LOG2 - math.log(dii))
    return out


@jit
def gwish_lognorm_complete(delta, tchol):
    # complete skeleton: dense Wishart normalizer with df = delta + p - 1
    p = tchol.shape[0]
    n = delta + p - 1.0
    logdet_d = 0.0
    for i in range(p):
        logdet_d += 2.0 * math.log(tchol[i, i])
    out = 0.5 * n * p * LOG2 - 0.5 * n * logdet_d
    out += 0.25 * p * (p - 1) * math.log(math.pi)
    for l in range(p):
        out += lgamma_pos(0.5 * (n - l))
    return out


@jit
def gwish_lognorm(A, delta, tchol, n_mc, seed1, seed2):
    """Closed forms for empty/complete skeletons, Monte Carlo otherwise."""
    p = A.shape[0]
    n_edge = 0
    for i in range(p):
        for j in range(i + 1, p):
            if A[i, j] == 1:
                n_edge += 1
    if n_edge == 0:
        return gwish_lognorm_empty(delta, tchol)
    if n_edge == p * (p - 1) // 2:
        return gwish_lognorm_complete(delta, tchol)
    return gwish_lognorm_mc(A, delta, tchol, n_mc, seed1, seed2)


@jit
def normalizer_get(cache, A, delta, tchol, n_mc, run_seed):
    """Skeleton-keyed lookup; values are deterministic in (skeleton, seed)
    so independent caches agree."""
    words = np.zeros(8, np.int64)
    pack_skeleton_key(A, words)
    key = (words[0], words[1], words[2], words[3],
           words[4], words[5], words[6], words[7])
    if key in cache:
        return cache[key]
    s1, s2 = seeds_from_words(words, run_seed)
    val = gwish_lognorm(A, delta, tchol, n_mc, s1, s2)
    cache[key] = val
    return val


# ---------------------------------------------------------------------------
# Metropolis-Hastings kernels
# ---------------------------------------------------------------------------

@jit
def sweep_prec(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes,
               comp_ll, comp_ld, scal, S, m, D, delta, eps_pd, phi, sigma_rw, rng):
    """One element-wise random-walk pass over the free precision entries."""
    p = A.shape[0]
    acc_n = 0
    prop_n = 0
    for i in range(p):
        for j in range(i, p):
            if i != j and A[i, j] != 1:
                continue
            c = comp_of[i]
            step = sigma_rw * rng.standard_normal()
            old = omega[i, j]
            omega[i, j] = old + step
            if j != i:
                omega[j, i] = old + step
            prop_n += 1
            ok, ll_new, ld_new = comp_loglik(c, comp_ptr, comp_nodes, par_ptr,
                                             par_nodes, omega, coef, S, m, eps_pd)
            if not ok:
                omega[i, j] = old
                if j != i:
                    omega[j, i] = old
                continue
            if i == j:
                dtr = D[i, i] * step
            else:
                dtr = 2.0 * D[i, j] * step
            dgw = 0.5 * (delta - 2.0) * (ld_new - comp_ld[c]) - 0.5 * dtr
            log_ratio = phi * (ll_new - comp_ll[c]) + dgw
            if math.log(rng.random()) < log_ratio:
                acc_n += 1
                scal[0] += ll_new - comp_ll[c]
                scal[1] += dgw
                comp_ll[c] = ll_new
                comp_ld[c] = ld_new
            else:
                omega[i, j] = old
                if j != i:
                    omega[j, i] = old
    return acc_n, prop_n


@jit
def sweep_coef(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes,
               comp_ll, comp_ld, scal, S, m, coef_mean, coef_var, phi, sigma_rw, rng):
    """One element-wise random-walk pass over the free coefficient entries."""
    p = A.shape[0]
    acc_n = 0
    prop_n = 0
    for i in range(p):
        for j in range(p):
            if A[i, j] != 3:
                continue
            c = comp_of[i]
            step = sigma_rw * rng.standard_normal()
            old = coef[i, j]
            new = old + step
            coef[i, j] = new
            prop_n += 1
            k = comp_ptr[c + 1] - comp_ptr[c]
            quad = comp_quad(c, comp_ptr, comp_nodes, par_ptr, par_nodes,
                             omega, coef, S)
            ll_new = 0.5 * m * (comp_ld[c] - k * LOG2PI) - 0.5 * quad
            dprior = log_normal_pdf(new, coef_mean, coef_var) \
                - log_normal_pdf(old, coef_mean, coef_var)
            log_ratio = phi * (ll_new - comp_ll[c]) + dprior
            if math.log(rng.random()) < log_ratio:
                acc_n += 1
                scal[0] += ll_new - comp_ll[c]
                scal[2] += dprior
                comp_ll[c] = ll_new
            else:
                coef[i, j] = old
    return acc_n, prop_n


@jit
def move_graph(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes,
               comp_ll, comp_ld, nc, scal, S, m, D, tchol, delta, coef_mean,
               coef_var, logp_edge, eps_pd, phi, sigma_edge, n_mc, run_seed,
               cache, rng):
    """Joint edge-code move: re-type one pair, refreshing or zeroing the
    affected parameter entries, with the fresh-draw proposal correction.

    Instant rejection (candidate not a chain graph) consumes no draws past
    the code draw; an infeasible (non-PD) candidate consumes the fresh
    parameter draw but no acceptance uniform.
    """
    p = A.shape[0]
    if p < 2:
        return 0, 0
    n_pairs = p * (p - 1) // 2
    r = rng.integers(0, n_pairs)
    i = 0
    idx = r
    while idx >= p - 1 - i:
        idx -= p - 1 - i
        i += 1
    j = i + 1 + idx
    old = A[i, j]
    k3 = rng.integers(0, 3)
    new = -1
    cnt = 0
    for cc in range(4):
        if cc != old:
            if cnt == k3:
                new = cc
                break
            cnt += 1

    A_cand = A.copy()
    A_cand[i, j] = new
    A_cand[j, i] = mirror_code(new)

    comp_of2 = np.empty(p, np.int64)
    comp_ptr2 = np.empty(p + 1, np.int64)
    comp_nodes2 = np.empty(p, np.int64)
    par_ptr2 = np.empty(p + 1, np.int64)
    par_nodes2 = np.empty(p * p, np.int64)
    n_comp2 = analyze_graph(A_cand, comp_of2, comp_ptr2, comp_nodes2,
                            par_ptr2, par_nodes2)
    if n_comp2 < 0:
        return 0, 1

    omega2 = omega.copy()
    coef2 = coef.copy()
    log_q_fwd = 0.0
    log_q_rev = 0.0
    var_edge = sigma_edge * sigma_edge
    if old == 1 and new != 1:
        log_q_rev += log_normal_pdf(omega[i, j], 0.0, var_edge)
        omega2[i, j] = 0.0
        omega2[j, i] = 0.0
    if new == 1:
        w = rng.normal(0.0, sigma_edge)
        omega2[i, j] = w
        omega2[j, i] = w
        log_q_fwd += log_normal_pdf(w, 0.0, var_edge)
    if old == 2:
        log_q_rev += log_normal_pdf(coef[j, i], coef_mean, coef_var)
        coef2[j, i] = 0.0
    if old == 3:
        log_q_rev += log_normal_pdf(coef[i, j], coef_mean, coef_var)
        coef2[i, j] = 0.0
    if new == 2:
        b = rng.normal(coef_mean, math.sqrt(coef_var))
        coef2[j, i] = b
        log_q_fwd += log_normal_pdf(b, coef_mean, coef_var)
    if new == 3:
        b = rng.normal(coef_mean, math.sqrt(coef_var))
        coef2[i, j] = b
        log_q_fwd += log_normal_pdf(b, coef_mean, coef_var)

    comp_ll2 = np.empty(p)
    comp_ld2 = np.empty(p)
    ok, ll2, gw2, cp2, gp2 = refresh_eval(A_cand, omega2, coef2, S, m, D, delta,
                                          coef_mean, coef_var, logp_edge, eps_pd,
                                          n_comp2, comp_ptr2, comp_nodes2,
                                          par_ptr2, par_nodes2, comp_ll2, comp_ld2)
    if not ok:
        return 0, 1

    if (old == 1) != (new == 1):
        log_norm2 = normalizer_get(cache, A_cand, delta, tchol, n_mc, run_seed)
    else:
        log_norm2 = scal[4]

    target_new = phi * ll2 + gw2 - log_norm2 + cp2 + gp2
    target_old = phi * scal[0] + scal[1] - scal[4] + scal[2] + scal[3]
    log_ratio = target_new - target_old + log_q_rev - log_q_fwd
    if math.log(rng.random()) >= log_ratio:
        return 0, 1

    A[:, :] = A_cand
    omega[:, :] = omega2
    coef[:, :] = coef2
    comp_of[:] = comp_of2
    comp_ptr[:] = comp_ptr2
    comp_nodes[:] = comp_nodes2
    par_ptr[:] = par_ptr2
    par_nodes[:] = par_nodes2
    for c in range(n_comp2):
        comp_ll[c] = comp_ll2[c]
        comp_ld[c] = comp_ld2[c]
    nc[0] = n_comp2
    scal[0] = ll2
    scal[1] = gw2
    scal[2] = cp2
    scal[3] = gp2
    scal[4] = log_norm2
    return 1, 1


@jit
def run_kernel(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr, par_nodes,
               comp_ll, comp_ld, nc, scal, S, m, D, tchol, delta, coef_mean,
               coef_var, logp_edge, eps_pd, phi, sigma_rw, sigma_edge, n_sweeps,
               n_mc, run_seed, cache, rng):
    """n_sweeps repetitions of [graph move; precision pass; coefficient pass]."""
    ag = 0
    pg = 0
    ao = 0
    po = 0
    ab = 0
    pb = 0
    for _ in range(n_sweeps):
        a, b = move_graph(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr,
                          par_nodes, comp_ll, comp_ld, nc, scal, S, m, D, tchol,
                          delta, coef_mean, coef_var, logp_edge, eps_pd, phi,
                          sigma_edge, n_mc, run_seed, cache, rng)
        ag += a
        pg += b
        a, b = sweep_prec(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr,
                          par_nodes, comp_ll, comp_ld, scal, S, m, D, delta,
                          eps_pd, phi, sigma_rw, rng)
        ao += a
        po += b
        a, b = sweep_coef(A, omega, coef, comp_of, comp_ptr, comp_nodes, par_ptr,
                          par_nodes, comp_ll, comp_ld, scal, S, m, coef_mean,
                          coef_var, phi, sigma_rw, rng)
        ab += a
        pb += b
    return ag, pg, ao, po, ab, pb
