"""End-to-end acceptance checks, one numbered criterion per test group.

These pin the advertised tolerances on frozen instances; the per-criterion
pass/fail summary is printed by the conftest hook.
"""
import json
import math
import os
import time

import numpy as np
import pytest

from homsample import cli, clustering, exact_oracle, generators, \
    graphon_metrics as gm, mcmc, observables
from homsample import spectral as sp
from homsample.netcore import Motif, Network, arm_edge_motif, cycle_motif, \
    has_odd_cycle, is_bidirectional, is_irreducible, motif_from_name, \
    path_motif, save_network, star_motif, two_arm_motif


# -- 1: torus time averages -------------------------------------------------

@pytest.mark.parametrize("chain", ["glauber", "pivot"])
@pytest.mark.parametrize("names,target", [
    (("H_3_0", "F_3_0"), 9 / 16),
    (("H_9_0", "F_9_0"), 3969 / 16384),
])
def test_criterion_01_torus_time_averages(chain, names, target):
    net = generators.torus(50)
    H = motif_from_name(names[0])
    F = motif_from_name(names[1])
    vals = []
    for seed in (1, 2, 3):
        est = observables.ChdEstimator(H, net)
        burn = None if chain == "glauber" else 0
        mcmc.run_chain(F, net, chain, steps=100_000, burnin=burn, seed=seed,
                       observers=[est])
        vals.append(float(est.result()))
    pooled = float(np.mean(vals))
    assert abs(pooled - target) <= 0.01, (chain, names, vals, pooled, target)


# -- 2: chain estimators against exact oracles ------------------------------

def _closing_edge(k):
    W = np.zeros((k, k))
    W[0, k - 1] = 1.0
    return Motif(W)


def test_criterion_02_estimators_match_oracles():
    t0 = time.monotonic()
    grid = observables.default_profile_grid(11)
    worst = 0.0
    for idx in range(20):
        rng = np.random.default_rng(500 + idx)
        n = int(rng.integers(4, 7))
        U = rng.random((n, n))
        A = 0.05 + 0.95 * (U + U.T) / 2
        np.fill_diagonal(A, 0.0)
        alpha = rng.random(n) + 0.2
        net = Network(A, alpha / alpha.sum())
        assert is_irreducible(net) and is_bidirectional(net)
        assert has_odd_cycle(net)
        motifs = [path_motif(3), star_motif(3), two_arm_motif(1, 1)]
        for m_idx, motif in enumerate(motifs):
            H = _closing_edge(motif.k)
            chd_want = exact_oracle.conditional_density(H, net, motif)
            prof_want = exact_oracle.exact_profile(H, net, motif, grid)
            macc_want = exact_oracle.exact_macc(motif, net)
            tran_want = exact_oracle.exact_transform(motif, net).dense_weights()
            for c_idx, chain in enumerate(["glauber", "pivot"]):
                ests = [observables.ChdEstimator(H, net),
                        observables.ProfileEstimator(H, net, grid=grid),
                        observables.MaccEstimator(motif, net),
                        observables.TransformEstimator(motif, net)]
                rng_run = np.random.default_rng([2024, idx, m_idx, c_idx])
                mcmc.run_ensemble(motif, net, chain, replicas=500, steps=400,
                                  burnin=100 if chain == "glauber" else 0,
                                  rng=rng_run, observers=ests)
                errs = [
                    abs(float(ests[0].result()) - chd_want),
                    float(np.max(np.abs(ests[1].result().values - prof_want))),
                    float(np.max(np.abs(ests[2].result() - macc_want))),
                    float(np.max(np.abs(ests[3].result().dense_weights()
                                        - tran_want))),
                ]
                worst = max(worst, max(errs))
                assert max(errs) <= 0.02, (idx, motif.name, chain, errs)
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0, (elapsed, worst)


# -- 3: glauber detailed balance --------------------------------------------

def test_criterion_03_glauber_detailed_balance():
    worst = 0.0
    squared_edge = Motif(np.array([[0.0, 2.0], [0.0, 0.0]]))
    motifs = [path_motif(3), two_arm_motif(1, 1), star_motif(3),
              cycle_motif(3), squared_edge]
    for i in range(10):
        rng = np.random.default_rng(300 + i)
        n = int(rng.integers(3, 5))
        U = rng.random((n, n))
        A = (U + U.T) / 2 + 0.1
        np.fill_diagonal(A, 0.0)
        alpha = rng.random(n) + 0.2
        net = Network(A, alpha / alpha.sum())
        _, P, pi = mcmc.glauber_transition_matrix(motifs[i % 5], net)
        m = P.shape[0]
        for r in range(m):
            for s in range(r + 1, m):
                f, g = pi[r] * P[r, s], pi[s] * P[s, r]
                if f == 0.0 and g == 0.0:
                    continue
                worst = max(worst, abs(f - g) / max(f, g))
    assert worst <= 1e-12, worst


# -- 4: full-state versus root-marginal mixing ------------------------------

def test_criterion_04_pivot_marginal_matches_full_state():
    rng = np.random.default_rng(41)
    U = rng.random((5, 5))
    A = (U + U.T) / 2 + 0.05
    np.fill_diagonal(A, 0.0)
    alpha = rng.random(5) + 0.2
    net = Network(A, alpha / alpha.sum())
    res = mcmc.empirical_mixing(path_motif(3), net, "pivot", horizon=25,
                                replicas=10_000, seed=11, bootstrap=200)
    diff = res["diff_raw"] - res["diff_h0_mean"]
    sd = res["diff_h0_sd"]
    for t in range(diff.shape[0]):
        if sd[t] == 0.0:
            assert diff[t] == 0.0, t
        else:
            assert abs(diff[t]) <= 3.0 * sd[t], (t, diff[t], sd[t])


# -- 5: coloring-style burn-in bound ----------------------------------------

def test_criterion_05_coloring_step_bound():
    motif = path_motif(4)
    delta = mcmc.motif_degree(motif)
    q = 2 * delta + 3
    eps = 0.1
    steps = mcmc.coloring_mixing_steps(q, delta, motif.k, eps)
    assert steps == 25
    net = generators.complete_network(q)
    res = mcmc.empirical_mixing(motif, net, "glauber", horizon=steps,
                                replicas=30_000, seed=13, bootstrap=100)
    got = res["tv_debiased"][steps]
    band = 3.0 * res["tv_se"][steps]
    assert got <= eps + band, (got, band)


# -- 6: spectral routes -----------------------------------------------------

def test_criterion_06_transform_matches_matrix_powers():
    cases = [(50, 12, 0), (120, 7, 1), (200, 12, 2), (200, 2, 3), (30, 3, 4)]
    for n, k, seed in cases:
        rng = np.random.default_rng(600 + seed)
        U = rng.random((n, n))
        A = (U + U.T) / 2
        alpha = rng.random(n) + 0.5
        net = Network(A, alpha / alpha.sum())
        D = np.diag(net.alpha)
        if k == 2:
            Nmat = D @ A @ D
        else:
            Nmat = D @ np.linalg.matrix_power(A @ D, k - 2) @ A @ D
        t = float(Nmat.sum())
        assert abs(sp.chain_density_direct(k, net) - t) <= 1e-9
        assert abs(sp.chain_density_spectral(k, net) - t) <= 1e-9
        got = sp.chain_transform(k, net).dense_weights()
        assert np.max(np.abs(got - Nmat / t)) <= 1e-9


def test_criterion_06_eigenvalue_formulas():
    for eps in (0.01, 0.1):
        for s in (0.2, 0.5, 0.9):
            A = np.array([[1.0, s, 0.0], [s, 1.0, s], [0.0, s, 1.0]])
            alpha = np.array([(1 - eps) / 2, eps, (1 - eps) / 2])
            vals, _ = sp.weighted_spectrum(Network(A, alpha))
            root = math.sqrt((1 - 3 * eps) ** 2
                             + 16 * s * s * eps * (1 - eps))
            want = np.sort(np.array([((1 + eps) + root) / 4,
                                     (1 - eps) / 2,
                                     ((1 + eps) - root) / 4]))
            assert np.max(np.abs(np.sort(vals) - want)) <= 1e-10, (eps, s)


# -- 7: long transforms reach the closure, which is unstable ----------------

def test_criterion_07_transform_limit_and_instability():
    for i in range(10):
        rng = np.random.default_rng(700 + i)
        n = int(rng.integers(8, 16))
        U = rng.random((n, n))
        A = (U + U.T) / 2 + 0.3
        alpha = rng.random(n) + 0.3
        net = Network(A, alpha / alpha.sum())
        assert is_irreducible(net)
        T50 = sp.chain_transform(50, net).dense_weights()
        C = sp.transitive_closure(net).dense_weights()
        assert np.max(np.abs(T50 - C)) <= 1e-6, i
    eps = 2e-4
    alpha = [0.5, 0.5]
    net_a = Network(np.array([[2.0, 0.0], [0.0, 2.0]]), alpha)
    net_b = Network(np.array([[2 - eps, eps], [eps, 2 - eps]]), alpha)
    input_l1 = float(np.abs(net_a.dense_weights()
                            - net_b.dense_weights()).sum())
    ca = sp.transitive_closure(net_a).dense_weights()
    cb = sp.transitive_closure(net_b).dense_weights()
    closure_l1 = float(np.abs(ca - cb).sum())
    assert input_l1 <= 1e-3, input_l1
    assert closure_l1 >= 0.5, closure_l1


# -- 8: step-kernel stability bounds ----------------------------------------

def test_criterion_08_stability_bounds_zero_violations():
    rng = np.random.default_rng(88)
    arm, two, p3 = arm_edge_motif(1, 1), two_arm_motif(1, 1), path_motif(3)
    for pair in range(200):
        U, W = gm.random_kernel_pair(rng, 5)
        checks = [gm.check_counting_stability(p3, U, W),
                  gm.check_conditional_stability(arm, two, U, W),
                  gm.check_transform_stability(p3, U, W),
                  gm.check_profile_stability(arm, two, U, W)]
        assert all(c["holds"] for c in checks), (pair, checks)


# -- 9: metric sandwich -----------------------------------------------------

def test_criterion_09_metric_sandwich_zero_violations():
    rng = np.random.default_rng(99)
    for pair in range(200):
        U, W = gm.random_kernel_pair(rng, 5)
        dcut = gm.delta_cut(U, W)
        dind = gm.delta_indicator(U, W)
        d1 = gm.delta_p(U, W, 1)
        assert dcut <= dind + 1e-12, (pair, dcut, dind)
        assert dind <= d1 + 1e-12, (pair, dind, d1)


# -- 10: single linkage, capacity, barbell ----------------------------------

def _brute_minimax(D):
    """Minimax cost over explicit simple paths, by exhaustive search."""
    n = D.shape[0]
    nbrs = [[u for u in range(n) if u != v and np.isfinite(D[v, u])]
            for v in range(n)]
    best = np.full((n, n), np.inf)
    np.fill_diagonal(best, 0.0)

    def dfs(start, v, mask, cur):
        for u in nbrs[v]:
            if (mask >> u) & 1:
                continue
            m = cur if cur >= D[v, u] else D[v, u]
            if m < best[start, u]:
                best[start, u] = m
            dfs(start, u, mask | (1 << u), m)

    for s in range(n):
        dfs(s, s, 1 << s, 0.0)
    return best


def test_criterion_10_merge_heights_and_capacity():
    for i in range(50):
        rng = np.random.default_rng(1000 + i)
        n = int(rng.integers(4, 9))
        U = rng.random((n, n))
        A = (U + U.T) / 2
        np.fill_diagonal(A, 0.0)
        if i % 3 == 0:
            drop = rng.random((n, n)) < 0.35
            A = np.where(drop | drop.T, 0.0, A)
        net = Network(A)
        dend = clustering.single_linkage(net)
        brute = _brute_minimax(clustering.dissimilarity_matrix(net))
        assert np.array_equal(dend.merge_heights, brute), i
        C = clustering.capacity_matrix(net)
        mx = net.max_weight()
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                for c in range(n):
                    if c != a and c != b:
                        assert C[a, b] >= min(C[a, c], C[c, b]), (i, a, b, c)
                if C[a, b] > 0:
                    assert dend.merge_heights[a, b] == mx - C[a, b]
                else:
                    assert np.isinf(dend.merge_heights[a, b])


def _drop_loops(net):
    A = net.dense_weights().copy()
    np.fill_diagonal(A, 0.0)
    return Network(A, net.alpha)


def test_criterion_10_barbell_triangle_transform():
    h1 = _drop_loops(generators.gamma_block_network(
        generators.ASSORTATIVE_TEMPLATE, 3, 1.0, seed=61))
    h2 = _drop_loops(generators.gamma_block_network(
        generators.ASSORTATIVE_TEMPLATE, 3, 1.0, seed=62))
    bar = generators.barbell(h1, h2, 0, 0)
    n1 = bar.n // 2
    raw = clustering.single_linkage(bar)
    assert np.all(np.isfinite(raw.merge_heights))
    tnet = exact_oracle.exact_transform(cycle_motif(3), bar)
    td = clustering.single_linkage(tnet)
    left = np.arange(n1)
    right = np.arange(n1, bar.n)
    assert np.all(np.isinf(td.merge_heights[np.ix_(left, right)]))
    assert np.all(np.isfinite(td.merge_heights[np.ix_(left, left)]))
    assert np.all(np.isfinite(td.merge_heights[np.ix_(right, right)]))


# -- 11: pipelines end to end -----------------------------------------------

def _sbm_collection():
    nets = []
    for i in range(5):
        nets.append(generators.gamma_block_network(
            generators.ASSORTATIVE_TEMPLATE, 5, 1.0, seed=100 + i))
    for i in range(5):
        nets.append(generators.gamma_block_network(
            generators.SKEWED_TEMPLATE, 5, math.sqrt(1.5), seed=200 + i))
    return nets


def test_criterion_11_macc_clustering():
    nets = _sbm_collection()
    names = [f"net{i}" for i in range(10)]
    res = cli.macc_pipeline(nets, names, motif_from_name("F_0_20"),
                            chain="glauber", seed=5, k=2, kmeans_seeds=10)
    truth = np.array([0] * 5 + [1] * 5)
    agree = []
    for s in range(10):
        labels = np.array(res["kmeans"][str(s)]["labels"])
        a = float(np.mean(labels == truth))
        agree.append(max(a, 1.0 - a))
    assert float(np.mean(agree)) >= 0.9, agree


def test_criterion_11_attribution_all_methods():
    rng = np.random.default_rng(7)
    nets, labels = [], []
    for tag, lo, hi in [("A", 6.0, 8.0), ("B", 0.2, 0.5)]:
        base = rng.uniform(1.0, 2.0, (6, 6)) + np.diag(rng.uniform(lo, hi, 6))
        for _ in range(5):
            M = base * rng.uniform(0.85, 1.2, (6, 6))
            nets.append(Network(generators.normalize_matrix(M, "row_markov")))
            labels.append(tag)
    res = cli.attribution_run(nets, labels, splits=1000, seed=0)
    for method in ("chd00", "kl", "frobenius"):
        assert res[method]["overall"] == 1.0, (method, res[method])


def test_criterion_11_bit_exact_rerun(tmp_path):
    nets = _sbm_collection()
    paths = []
    for i, net in enumerate(nets):
        p = str(tmp_path / f"net{i}.tsv")
        save_network(net, p)
        paths.append(p)
    outs = [str(tmp_path / "r1"), str(tmp_path / "r2")]
    for out in outs:
        rc = cli.main(["--out-dir", out, "--seed", "5", "--format", "csv",
                       "macc-pipeline", "--networks"] + paths +
                      ["--chain-motif", "F_0_20", "--steps", "300"])
        assert rc == 0
    names = sorted(f for f in os.listdir(outs[0]) if not f.endswith(".png"))
    assert names == sorted(f for f in os.listdir(outs[1])
                           if not f.endswith(".png"))
    assert "report.json" in names and "frobenius.csv" in names
    for name in names:
        with open(os.path.join(outs[0], name), "rb") as fh:
            b1 = fh.read()
        with open(os.path.join(outs[1], name), "rb") as fh:
            b2 = fh.read()
        assert b1 == b2, name
    reports = []
    for out in outs:
        with open(os.path.join(out, "report.json")) as fh:
            reports.append(json.load(fh))
    assert reports[0]["config_hash"] == reports[1]["config_hash"]
