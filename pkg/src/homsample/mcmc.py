"""Markov chains over vertex maps of a motif into a network.

Two samplers target the stationary law proportional to the map weight: a
single-site Glauber chain for arbitrary motifs and a pivot chain for rooted
trees, which moves the root by Metropolis and redraws the remaining nodes
from the exact conditional along the tree.  The rest of the module bounds
and measures how fast they mix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import exact_oracle
from .netcore import (
    ConfigError,
    InitializationError,
    Motif,
    hom_weight,
    is_bidirectional,
    is_irreducible,
    has_odd_cycle,
    diameter,
)

INIT_FAIL_MSG = "initialization failed; t(F,G) may be 0"

LOG_SPACE_MOTIF_SIZE = 16
LOG_SPACE_WEIGHT_FLOOR = 1e-8


def default_burnin(n):
    """Burn-in heuristic, about 2 n log n single-site updates."""
    return max(1, math.ceil(2 * n * math.log(max(n, 2))))


def _categorical(w, rng):
    c = np.cumsum(w)
    total = c[-1]
    if total <= 0:
        raise RuntimeError("all conditional weights vanished mid-chain")
    u = rng.random() * total
    return min(int(np.searchsorted(c, u, side="right")), w.shape[0] - 1)


def _categorical_rows(W, rng):
    C = np.cumsum(W, axis=1)
    totals = C[:, -1]
    if np.any(totals <= 0):
        raise RuntimeError("all conditional weights vanished mid-chain")
    u = rng.random(W.shape[0]) * totals
    idx = (C <= u[:, None]).sum(axis=1)
    return np.minimum(idx, W.shape[1] - 1)


class GlauberSampler:
    """Single-site resampling chain for any motif.

    One step picks a uniform site and redraws it from the conditional law
    given the rest of the map.  Falls back to log-space weights for large
    motifs or very small edge weights.
    """

    def __init__(self, motif, net, use_log=None):
        self.motif = motif
        self.net = net
        self.k = motif.k
        self.n = net.n
        A = net.dense_weights()
        self.A = A
        self.alpha = net.alpha
        F = motif.weights
        self.in_edges = []   # per site i: (j, e) with F[j, i] > 0, j != i
        self.out_edges = []  # per site i: (j, e) with F[i, j] > 0, j != i
        self.loop_exp = np.diag(F).copy()
        for i in range(self.k):
            self.in_edges.append([(j, F[j, i]) for j in range(self.k)
                                  if j != i and F[j, i] > 0])
            self.out_edges.append([(j, F[i, j]) for j in range(self.k)
                                   if j != i and F[i, j] > 0])
        if use_log is None:
            pos = A[A > 0]
            use_log = (self.k > LOG_SPACE_MOTIF_SIZE
                       or (pos.size > 0 and pos.min() < LOG_SPACE_WEIGHT_FLOOR))
        self.use_log = bool(use_log)
        if self.use_log:
            with np.errstate(divide="ignore"):
                self.logA = np.log(A)
                self.logalpha = np.log(net.alpha)

    def site_weights(self, x, i):
        """Unnormalized conditional weights over values of site i."""
        if self.use_log:
            L = self.logalpha.copy()
            for j, e in self.in_edges[i]:
                L += e * self.logA[x[j], :]
            for j, e in self.out_edges[i]:
                L += e * self.logA[:, x[j]]
            if self.loop_exp[i] > 0:
                L += self.loop_exp[i] * np.diag(self.logA)
            mx = L.max()
            if not np.isfinite(mx):
                return np.zeros(self.n)
            return np.exp(L - mx)
        w = self.alpha.copy()
        for j, e in self.in_edges[i]:
            row = self.A[x[j], :]
            w = w * (row if e == 1.0 else row ** e)
        for j, e in self.out_edges[i]:
            col = self.A[:, x[j]]
            w = w * (col if e == 1.0 else col ** e)
        if self.loop_exp[i] > 0:
            d = np.diag(self.A)
            w = w * (d if self.loop_exp[i] == 1.0 else d ** self.loop_exp[i])
        return w

    def site_weights_batch(self, X, i):
        if self.use_log:
            L = np.broadcast_to(self.logalpha, (X.shape[0], self.n)).copy()
            for j, e in self.in_edges[i]:
                L += e * self.logA[X[:, j], :]
            for j, e in self.out_edges[i]:
                L += e * self.logA.T[X[:, j], :]
            if self.loop_exp[i] > 0:
                L += self.loop_exp[i] * np.diag(self.logA)[None, :]
            mx = L.max(axis=1, keepdims=True)
            bad = ~np.isfinite(mx[:, 0])
            if bad.any():
                raise RuntimeError("all conditional weights vanished mid-chain")
            return np.exp(L - mx)
        W = np.broadcast_to(self.alpha, (X.shape[0], self.n)).copy()
        for j, e in self.in_edges[i]:
            rows = self.A[X[:, j], :]
            W = W * (rows if e == 1.0 else rows ** e)
        for j, e in self.out_edges[i]:
            cols = self.A.T[X[:, j], :]
            W = W * (cols if e == 1.0 else cols ** e)
        if self.loop_exp[i] > 0:
            d = np.diag(self.A)
            W = W * (d if self.loop_exp[i] == 1.0 else d ** self.loop_exp[i])[None, :]
        return W

    def step(self, x, rng):
        i = int(rng.integers(self.k))
        x[i] = _categorical(self.site_weights(x, i), rng)
        return x

    def step_batch(self, X, rng):
        """One shared-site update across all replica rows of X, in place."""
        i = int(rng.integers(self.k))
        X[:, i] = _categorical_rows(self.site_weights_batch(X, i), rng)
        return X


def glauber_conditional(motif, net, x, i):
    """Normalized law the Glauber chain uses to redraw site i of map x."""
    x = np.asarray(x, dtype=int)
    w = GlauberSampler(motif, net).site_weights(x, i)
    s = w.sum()
    if s <= 0:
        raise ValueError("map has no positive-weight extension at this site")
    return w / s


def initial_hom(motif, net, rng, tries=200):
    """A positive-weight starting map, by randomized greedy fill.

    Sites are assigned in order, each drawn from the weights induced by the
    already assigned neighbors.  Small problems fall back to exhaustive
    search before giving up.
    """
    k, n = motif.k, net.n
    A = net.dense_weights()
    F = motif.weights
    alpha = net.alpha
    for _ in range(tries):
        x = np.zeros(k, dtype=int)
        ok = True
        for i in range(k):
            w = alpha.copy()
            for j in range(i):
                if F[j, i] > 0:
                    w = w * A[x[j], :] ** F[j, i]
                if F[i, j] > 0:
                    w = w * A[:, x[j]] ** F[i, j]
            if F[i, i] > 0:
                w = w * np.diag(A) ** F[i, i]
            s = w.sum()
            if s <= 0:
                ok = False
                break
            x[i] = _categorical(w, rng)
        if ok and hom_weight(motif, net, x) > 0:
            return x
    if n ** k <= 10 ** 6:
        for X in exact_oracle._chunk_maps(n, k):
            w = exact_oracle._map_weights(motif, net, X)
            hit = np.nonzero(w > 0)[0]
            if hit.size:
                return X[hit[0]].copy()
    raise InitializationError(INIT_FAIL_MSG)


class PivotTables:
    """Everything the pivot chain precomputes for a rooted tree motif.

    Holds the symmetrized root proposal, the upward subtree messages, the
    root marginal of the stationary law, and per-child sampling tables used
    to redraw nodes 1..k-1 given the root.
    """

    def __init__(self, motif, net):
        if not motif.is_rooted_tree():
            raise ValueError("pivot chain needs a rooted tree motif")
        self.motif = motif
        self.net = net
        self.k = motif.k
        self.n = net.n
        A = net.dense_weights()
        alpha = net.alpha
        sym = np.maximum(A, A.T)
        prop = sym * alpha[None, :]
        row_sums = prop.sum(axis=1)
        if np.any(row_sums <= 0):
            raise ValueError("pivot proposal needs every node on a positive link")
        self.psi = prop / row_sums[:, None]
        self.parents = motif.parents()
        F = motif.weights
        children = [[] for _ in range(self.k)]
        for i in range(1, self.k):
            children[self.parents[i]].append(i)
        self.children = children
        # upward messages, max-normalized per node to keep the scale tame
        msgs = np.ones((self.k, self.n))
        for i in range(self.k - 1, -1, -1):
            m = np.ones(self.n)
            for u in children[i]:
                e = F[i, u]
                Ae = A if e == 1.0 else A ** e
                m = m * (Ae @ (alpha * msgs[u]))
            mx = m.max()
            if mx <= 0:
                raise InitializationError(INIT_FAIL_MSG)
            msgs[i] = m / mx
        self.messages = msgs
        pi1 = alpha * msgs[0]
        Z = pi1.sum()
        if Z <= 0:
            raise InitializationError(INIT_FAIL_MSG)
        self.pi1 = pi1 / Z
        # per-child data: row a (parent value) -> A(a,.)^e * alpha * message
        # rows are built on demand so large networks stay cheap
        self._A = A
        self._child_e = np.zeros(self.k)
        self._child_w = [None] * self.k
        for i in range(1, self.k):
            self._child_e[i] = F[self.parents[i], i]
            self._child_w[i] = alpha * msgs[i]

    def child_row(self, i, a):
        """Unnormalized law of child i given its parent sits at node a."""
        e = self._child_e[i]
        row = self._A[a]
        if e != 1.0:
            row = row ** e
        return row * self._child_w[i]

    def child_rows(self, i, parents):
        e = self._child_e[i]
        R = self._A[parents]
        if e != 1.0:
            R = R ** e
        return R * self._child_w[i][None, :]

    @property
    def child_tables(self):
        """Full per-child tables; materialized only when asked for."""
        tables = [None] * self.k
        for i in range(1, self.k):
            tables[i] = self.child_rows(i, np.arange(self.n))
        return tables

    def sample_root(self, rng):
        return _categorical(self.pi1, rng)

    def resample_children(self, x, rng):
        for i in range(1, self.k):
            x[i] = _categorical(self.child_row(i, x[self.parents[i]]), rng)
        return x

    def sample_state(self, rng):
        """Exact draw from the stationary law."""
        x = np.zeros(self.k, dtype=int)
        x[0] = self.sample_root(rng)
        return self.resample_children(x, rng)

    def _accept_ratio(self, a, b):
        denom = self.pi1[a] * self.psi[a, b]
        if denom <= 0:
            return 1.0
        return (self.pi1[b] * self.psi[b, a]) / denom

    def step(self, x, rng):
        """Root Metropolis move plus full child redraw; children move even
        when the root proposal is rejected."""
        a = x[0]
        b = _categorical(self.psi[a], rng)
        accepted = rng.random() < min(1.0, self._accept_ratio(a, b))
        if accepted:
            x[0] = b
        self.resample_children(x, rng)
        return x, bool(accepted)

    def step_batch(self, X, rng):
        roots = X[:, 0]
        props = _categorical_rows(self.psi[roots], rng)
        num = self.pi1[props] * self.psi[props, roots]
        den = self.pi1[roots] * self.psi[roots, props]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
        accept = rng.random(X.shape[0]) < np.minimum(1.0, ratio)
        X[:, 0] = np.where(accept, props, roots)
        for i in range(1, self.k):
            X[:, i] = _categorical_rows(self.child_rows(i, X[:, self.parents[i]]), rng)
        return X, int(accept.sum())

    def root_kernel(self):
        """Explicit transition matrix of the root Metropolis walk."""
        n = self.n
        num = self.pi1[None, :] * self.psi.T
        den = self.pi1[:, None] * self.psi
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
        P = self.psi * np.minimum(1.0, ratio)
        np.fill_diagonal(P, 0.0)
        np.fill_diagonal(P, 1.0 - P.sum(axis=1))
        return P


@dataclass
class ChainResult:
    state: np.ndarray
    steps: int
    accept_rate: float | None = None
    samples: np.ndarray | None = None


def _resolve_rng(seed, rng):
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


def run_chain(motif, net, chain="glauber", steps=1000, burnin=None, thin=1,
              seed=None, rng=None, x0=None, observers=(), collect=False):
    """Run one chain and feed thinned post-burn-in states to the observers.

    Returns the final state plus, for the pivot chain, the root acceptance
    rate, and the collected states when collect is set.
    """
    if steps < 1:
        raise ConfigError("steps must be at least 1")
    if thin < 1:
        raise ConfigError("thinning must be at least 1")
    rng = _resolve_rng(seed, rng)
    if burnin is None:
        burnin = default_burnin(net.n)
    if chain == "glauber":
        sampler = GlauberSampler(motif, net)
        if x0 is None:
            x = initial_hom(motif, net, rng)
        else:
            x = np.asarray(x0, dtype=int).copy()
            if hom_weight(motif, net, x) <= 0:
                raise InitializationError(INIT_FAIL_MSG)
        step = lambda x: sampler.step(x, rng)
    elif chain == "pivot":
        tables = PivotTables(motif, net)
        if x0 is None:
            x = tables.sample_state(rng)
        else:
            x = np.asarray(x0, dtype=int).copy()
            if tables.pi1[x[0]] <= 0:
                raise InitializationError(INIT_FAIL_MSG)
        n_acc = 0

        def step(x):
            nonlocal n_acc
            x, acc = tables.step(x, rng)
            n_acc += acc
            return x
    else:
        raise ConfigError(f"unknown chain {chain!r}")
    for _ in range(burnin):
        x = step(x)
    kept = []
    for t in range(1, steps + 1):
        x = step(x)
        if t % thin == 0:
            for ob in observers:
                ob.update(x)
            if collect:
                kept.append(x.copy())
    rate = None
    if chain == "pivot":
        rate = n_acc / (burnin + steps)
    return ChainResult(state=x, steps=steps, accept_rate=rate,
                       samples=np.array(kept) if collect else None)


def run_ensemble(motif, net, chain="glauber", replicas=100, steps=100,
                 burnin=None, seed=None, rng=None, x0=None, observers=()):
    """Many replicas advanced in lockstep; observers get whole batches.

    Each replica is a faithful chain (the Glauber site sequence is shared
    across replicas, which does not change the single-chain law).  Observers
    see replicas x steps samples through update_batch.
    """
    if steps < 1:
        raise ConfigError("steps must be at least 1")
    rng = _resolve_rng(seed, rng)
    if burnin is None:
        burnin = default_burnin(net.n)
    if chain == "glauber":
        sampler = GlauberSampler(motif, net)
        if x0 is None:
            x0 = initial_hom(motif, net, rng)
        X = np.tile(np.asarray(x0, dtype=int), (replicas, 1))
        for _ in range(burnin):
            sampler.step_batch(X, rng)
        for _ in range(steps):
            sampler.step_batch(X, rng)
            for ob in observers:
                ob.update_batch(X)
        return X, None
    if chain == "pivot":
        tables = PivotTables(motif, net)
        if x0 is None:
            X = np.stack([tables.sample_state(rng) for _ in range(replicas)])
        else:
            X = np.tile(np.asarray(x0, dtype=int), (replicas, 1))
            if np.any(tables.pi1[X[:, 0]] <= 0):
                raise InitializationError(INIT_FAIL_MSG)
        n_acc = 0
        for _ in range(burnin):
            X, _ = tables.step_batch(X, rng)
        for _ in range(steps):
            X, acc = tables.step_batch(X, rng)
            n_acc += acc
            for ob in observers:
                ob.update_batch(X)
        return X, n_acc / (replicas * max(steps, 1))
    raise ConfigError(f"unknown chain {chain!r}")


def glauber_transition_matrix(motif, net):
    """Full single-step kernel on the positive-weight maps, for small cases.

    Returns (states, P, pi): the support states row by row, the transition
    matrix between them, and the stationary law restricted to the support.
    """
    dist = exact_oracle.exact_pi(motif, net)
    n, k = dist.n, dist.k
    support = np.nonzero(dist.probs > 0)[0]
    index_of = {int(s): r for r, s in enumerate(support)}
    states = np.stack([np.array(np.unravel_index(s, (n,) * k)) for s in support])
    sampler = GlauberSampler(motif, net)
    m = support.shape[0]
    P = np.zeros((m, m))
    for r in range(m):
        x = states[r].copy()
        for i in range(k):
            w = sampler.site_weights(x, i)
            s = w.sum()
            for b in np.nonzero(w)[0]:
                y = x.copy()
                y[i] = b
                flat = int(np.ravel_multi_index(tuple(y), (n,) * k))
                P[r, index_of[flat]] += w[b] / (s * k)
    pi = dist.probs[support]
    pi = pi / pi.sum()
    return states, P, pi


# -- mixing diagnostics -----------------------------------------------------

def worst_start(motif, net):
    """Support state with the smallest stationary mass."""
    dist = exact_oracle.exact_pi(motif, net)
    probs = np.where(dist.probs > 0, dist.probs, np.inf)
    idx = int(np.argmin(probs))
    return np.array(np.unravel_index(idx, (dist.n,) * dist.k))


def _tv_to(counts, target):
    return 0.5 * np.abs(counts - target).sum()


def _tv_draw_stats(center, target, replicas, rng, n_draws):
    """Mean and spread of the empirical TV to target when the truth is
    center and replicas samples are drawn."""
    draws = rng.multinomial(replicas, center, size=n_draws) / replicas
    tvs = 0.5 * np.abs(draws - target).sum(axis=1)
    return float(tvs.mean()), float(tvs.std())


def debias_tv(p_hat, target, replicas, rng, n_draws=50, iters=8):
    """Estimate the true TV behind a plug-in measurement.

    The plug-in TV of an empirical law sits above the truth by a sampling
    bias that depends on how far the truth is from the target, so a fixed
    correction cannot work at both ends.  Instead, scale the observed
    deviation: along centers (1 - s) target + s p_hat the true TV is s
    times the plug-in value, and the expected plug-in TV at scale s is
    monotone in s, so the s whose expected measurement reproduces the
    observed one is found by bisection.  Exact at stationarity (s = 0) and
    in the strong-signal limit (s = 1).  Returns (estimate, spread), where
    spread is the sampling sd of the plug-in TV at the solved scale.
    """
    raw = _tv_to(p_hat, target)
    floor_mean, floor_sd = _tv_draw_stats(target, target, replicas, rng, n_draws)
    if raw <= floor_mean:
        return 0.0, floor_sd
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = (lo + hi) / 2
        center = (1 - mid) * target + mid * p_hat
        m, _ = _tv_draw_stats(center, target, replicas, rng, n_draws)
        if m < raw:
            lo = mid
        else:
            hi = mid
    s_hat = (lo + hi) / 2
    center = (1 - s_hat) * target + s_hat * p_hat
    _, sd = _tv_draw_stats(center, target, replicas, rng, n_draws)
    return s_hat * raw, sd


def empirical_mixing(motif, net, chain="glauber", horizon=25, replicas=10000,
                     seed=None, start="worst", bootstrap=100, x0=None):
    """Empirical distance to stationarity step by step.

    All replicas start from one state (the lowest-mass support state unless
    x0 is given); the step-0 row is the exact point-mass distance.  Each
    later step reports the plug-in TV of the replica ensemble to the exact
    stationary law, plus a debiased estimate and its sampling spread from
    debias_tv.  For the pivot chain the root-marginal curve
    comes along, and the full-minus-root raw difference is calibrated by a
    parametric bootstrap drawn under the exact root-times-conditional
    factorization of the state law, so the identity between the two curves
    can be checked against honest noise bands (diff_h0_mean, diff_h0_sd).
    """
    rng = np.random.default_rng(seed)
    dist = exact_oracle.exact_pi(motif, net)
    n, k = dist.n, dist.k
    flat_pi = dist.probs
    S = flat_pi.shape[0]
    if x0 is not None:
        x_start = np.asarray(x0, dtype=int)
    elif start == "worst":
        x_start = worst_start(motif, net)
    else:
        x_start = np.asarray(start, dtype=int)
    if chain == "glauber":
        sampler = GlauberSampler(motif, net)
        stepper = lambda X: sampler.step_batch(X, rng)
    elif chain == "pivot":
        tables = PivotTables(motif, net)
        stepper = lambda X: tables.step_batch(X, rng)[0]
    else:
        raise ConfigError(f"unknown chain {chain!r}")
    pi_root = dist.site_marginal(0)
    tail = n ** (k - 1)
    # conditional law of the non-root nodes given the root, for the paired
    # identity bootstrap
    joint = flat_pi.reshape(n, tail)
    cond = np.zeros_like(joint)
    pos = pi_root > 0
    cond[pos] = joint[pos] / pi_root[pos, None]
    X = np.tile(x_start, (replicas, 1))
    steps = np.arange(0, horizon + 1)
    raw = np.zeros(horizon + 1)
    debiased = np.zeros(horizon + 1)
    se = np.zeros(horizon + 1)
    raw_root = np.zeros(horizon + 1)
    debiased_root = np.zeros(horizon + 1)
    diff_h0_mean = np.zeros(horizon + 1)
    diff_h0_sd = np.zeros(horizon + 1)
    # the step-0 law is the point mass at the start, known exactly
    start_flat = int(np.ravel_multi_index(tuple(x_start), (n,) * k))
    raw[0] = debiased[0] = 1.0 - flat_pi[start_flat]
    raw_root[0] = debiased_root[0] = 1.0 - pi_root[x_start[0]]
    diff_h0_mean[0] = raw[0] - raw_root[0]
    for t in range(1, horizon + 1):
        X = stepper(X)
        flat = np.ravel_multi_index(tuple(X.T), (n,) * k)
        counts = np.bincount(flat, minlength=S)
        p_hat = counts / replicas
        raw[t] = _tv_to(p_hat, flat_pi)
        root_hat = p_hat.reshape(n, tail).sum(axis=1)
        raw_root[t] = _tv_to(root_hat, pi_root)
        if bootstrap > 0:
            debiased[t], se[t] = debias_tv(p_hat, flat_pi, replicas, rng,
                                           n_draws=bootstrap // 2 or 1)
            debiased_root[t], _ = debias_tv(root_hat, pi_root, replicas, rng,
                                            n_draws=bootstrap // 2 or 1)
            if chain == "pivot":
                model = (root_hat[:, None] * cond).ravel()
                tot = model.sum()
                if tot > 0:
                    model = model / tot
                draws = rng.multinomial(replicas, model, size=bootstrap) / replicas
                tv_star = 0.5 * np.abs(draws - flat_pi).sum(axis=1)
                droot = draws.reshape(bootstrap, n, tail).sum(axis=2)
                tv_star_root = 0.5 * np.abs(droot - pi_root).sum(axis=1)
                d = tv_star - tv_star_root
                diff_h0_mean[t] = d.mean()
                diff_h0_sd[t] = d.std()
        else:
            debiased[t] = raw[t]
            debiased_root[t] = raw_root[t]
    out = {"steps": steps, "tv_raw": raw, "tv_debiased": debiased, "tv_se": se}
    if chain == "pivot":
        out.update({"root_tv_raw": raw_root, "root_tv_debiased": debiased_root,
                    "diff_raw": raw - raw_root, "diff_h0_mean": diff_h0_mean,
                    "diff_h0_sd": diff_h0_sd})
    return out


def glauber_contraction(net, d, prime=False, cap=10 ** 7):
    """Extremes of the star contraction quantity over one-leaf swaps.

    Enumerates all maps of the d-leaf star sharing a root value and
    differing in exactly one leaf, takes 1 - 2 d TV between the two root
    conditionals (1 - d TV with prime set), and returns (max, min).
    """
    n = net.n
    if n ** (d + 1) > cap:
        raise ValueError("contraction enumeration too large")
    A = net.dense_weights()
    alpha = net.alpha
    factor = d if prime else 2 * d
    best = -math.inf
    worst = math.inf
    found = False
    for r in range(n):
        nb = np.nonzero(A[r] > 0)[0]
        if nb.size == 0:
            continue
        for common in itertools.product(nb, repeat=d - 1):
            base = alpha.copy()
            for w in common:
                base = base * A[:, w]
            for vi in range(nb.size):
                mu_v = base * A[:, nb[vi]]
                sv = mu_v.sum()
                for wi in range(vi + 1, nb.size):
                    mu_w = base * A[:, nb[wi]]
                    sw = mu_w.sum()
                    if sv <= 0 or sw <= 0:
                        continue
                    tv = 0.5 * np.abs(mu_v / sv - mu_w / sw).sum()
                    val = 1.0 - factor * tv
                    best = max(best, val)
                    worst = min(worst, val)
                    found = True
    if not found:
        raise ValueError("no one-leaf swap pairs exist in this network")
    return best, worst


def motif_degree(motif):
    """Largest number of distinct other nodes a motif node touches."""
    W = motif.weights
    sup = (W + W.T) > 0
    np.fill_diagonal(sup, False)
    return int(sup.sum(axis=1).max()) if motif.k > 1 else 0


def glauber_tree_mixing_bound(motif, net, eps):
    """Reported tree-motif mixing bound with both contraction extremes.

    Requires a rooted tree motif and an irreducible, bidirectional network
    whose skeleton contains an odd cycle.
    """
    if not motif.is_rooted_tree():
        raise ValueError("bound needs a rooted tree motif")
    if not is_irreducible(net) or not is_bidirectional(net):
        raise ValueError("bound needs an irreducible bidirectional network")
    if not has_odd_cycle(net):
        raise ValueError("bound needs an odd cycle in the skeleton")
    diam = diameter(net)
    if math.isinf(diam):
        raise ValueError("bound needs a finite diameter")
    d = motif_degree(motif)
    c_max, c_min = glauber_contraction(net, d)
    k = motif.k

    def bound(c):
        if c <= 0:
            return None
        return math.ceil(2 * c * k * math.log(2 * k / eps) * (diam + 1))

    return {"c_max": c_max, "c_min": c_min, "degree": d, "diameter": diam,
            "bound_c_max": bound(c_max), "bound_c_min": bound(c_min)}


def coloring_mixing_steps(q, delta, k, eps):
    """Standard coloring-chain step count for q above twice the degree."""
    if q <= 2 * delta:
        raise ValueError("needs q > 2 * delta")
    return math.ceil((q - delta) / (q - 2 * delta) * k * math.log(k / eps))


def exact_tmix(P, pi, eps=0.25, tmax=10 ** 5):
    """First step where the worst-start total variation drops to eps."""
    n = P.shape[0]
    M = np.eye(n)
    for t in range(1, tmax + 1):
        M = M @ P
        worst = 0.5 * np.abs(M - pi[None, :]).sum(axis=1).max()
        if worst <= eps:
            return t
    raise RuntimeError(f"no mixing within {tmax} steps")


def pivot_mixing_bounds(tables, eps=0.25):
    """Spectral sandwich for the pivot root walk.

    Uses the absolute spectral gap of the root kernel; the upper bound
    plugs in the smallest stationary root mass.
    """
    P = tables.root_kernel()
    pi = tables.pi1
    support = np.nonzero(pi > 0)[0]
    Ps = P[np.ix_(support, support)]
    ps = pi[support]
    s = np.sqrt(ps)
    Sym = (s[:, None] * Ps) / s[None, :]
    Sym = (Sym + Sym.T) / 2
    vals = np.sort(np.linalg.eigvalsh(Sym))[::-1]
    if vals.shape[0] < 2:
        return {"lambda_star": 0.0, "lower": 0.0, "upper": 0.0}
    lam_star = max(abs(vals[1]), abs(vals[-1]))
    gap = 1.0 - lam_star
    if gap <= 0:
        return {"lambda_star": lam_star, "lower": math.inf, "upper": math.inf}
    lower = lam_star * math.log(1.0 / (2 * eps)) / gap
    upper = math.log(1.0 / (ps.min() * eps)) / gap
    return {"lambda_star": float(lam_star), "lower": float(lower),
            "upper": float(upper)}


def singleton_pivot_bounds(net, eps=0.25):
    """Spectral mixing bounds for the one-node-motif pivot walk.

    With a single-node motif the stationary root law is alpha itself, so
    this is the Metropolis walk on the network with target alpha.
    """
    if not is_irreducible(net):
        raise ValueError("spectral bounds need an irreducible network")
    tables = PivotTables(Motif(np.zeros((1, 1))), net)
    return pivot_mixing_bounds(tables, eps)


def pivot_cubic_bound(n, eps):
    """Cubic meeting-time bound for degree-weighted walks on big simple nets."""
    if n < 13:
        raise ValueError("cubic bound stated for n >= 13")
    poly = 4 / 27 * n ** 3 + 4 / 3 * n ** 2 + 2 / 9 * n - 296 / 27
    return math.log2(1.0 / eps) * poly


# -- concentration ----------------------------------------------------------

def scalar_ci_halfwidth(n_samples, tmix_quarter, failure_prob=0.05, cutoff=False):
    """Half-width so the time-average of a bounded observable misses its
    mean with probability below failure_prob."""
    if n_samples < 1 or tmix_quarter < 1:
        raise ValueError("need positive sample count and mixing time")
    if not (0 < failure_prob < 1):
        raise ValueError("failure probability must sit in (0, 1)")
    c = 4.0 if cutoff else 9.0
    return math.sqrt(c * tmix_quarter * math.log(2.0 / failure_prob)
                     / (2.0 * n_samples))


def vector_tail_bound(n_samples, delta, eps):
    """Tail mass for the sup-norm error of a vector observable average,
    given burn-in at least the eps mixing time."""
    return 2 * math.e ** 2 * math.exp(-delta ** 2 * n_samples / 2.0) + eps


def vector_concentration(samples, delta, eps):
    """Mean of sup-bounded vector samples plus its tail bound.

    Raises when any coordinate leaves [-1, 1]; the bound needs that.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if np.abs(samples).max() > 1 + 1e-12:
        raise ValueError("vector observable must stay within [-1, 1]")
    return samples.mean(axis=0), vector_tail_bound(samples.shape[0], delta, eps)
