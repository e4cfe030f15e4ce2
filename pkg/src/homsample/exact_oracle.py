"""Exact quantities by full enumeration over vertex maps.

Everything here walks the whole space of n^k maps from a k-node motif into an
n-node network, so it only works for small problems (the enumeration cap is
10^8 maps).  These routines are deliberately simple; the samplers and
estimators elsewhere are checked against them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netcore import Motif, Network

ENUM_CAP = 10 ** 8
_CHUNK = 1 << 18


def _check_cap(n, k, cap):
    total = n ** k
    if total > cap:
        raise ValueError(
            f"enumeration over {n}^{k} = {total} maps exceeds the cap {cap}")
    return total


def _chunk_maps(n, k, chunk=_CHUNK):
    """Yield (k-column) blocks of all n^k vertex maps in lexicographic order."""
    total = n ** k
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        X = np.empty((idx.shape[0], k), dtype=np.int64)
        rem = idx
        for pos in range(k - 1, -1, -1):
            X[:, pos] = rem % n
            rem = rem // n
        yield X


def _map_weights(motif, net, X):
    """Stationary weights (alpha included, unnormalized) for a block of maps."""
    A = net.dense_weights()
    w = np.prod(net.alpha[X], axis=1)
    for i, j, e in motif.edges():
        vals = A[X[:, i], X[:, j]]
        w = w * (vals if e == 1.0 else vals ** e)
        if not w.any():
            break
    return w


def hom_density(motif, net, cap=ENUM_CAP):
    """Homomorphism density t(F, G) by brute force."""
    _check_cap(net.n, motif.k, cap)
    total = 0.0
    for X in _chunk_maps(net.n, motif.k):
        total += float(_map_weights(motif, net, X).sum())
    return total


@dataclass
class ExactDistribution:
    """Full stationary law over vertex maps, flat-indexed lexicographically."""

    probs: np.ndarray
    partition: float
    n: int
    k: int

    def prob(self, x):
        idx = np.ravel_multi_index(tuple(np.asarray(x, dtype=int)),
                                   (self.n,) * self.k)
        return float(self.probs[idx])

    def site_marginal(self, site):
        shaped = self.probs.reshape((self.n,) * self.k)
        axes = tuple(a for a in range(self.k) if a != site)
        return shaped.sum(axis=axes)

    def flat_index(self, x):
        return int(np.ravel_multi_index(tuple(np.asarray(x, dtype=int)),
                                        (self.n,) * self.k))


def exact_pi(motif, net, cap=10 ** 7):
    """Stationary law of the motif-sampling chains, as an ExactDistribution.

    Raises ValueError when t(F, G) = 0, where no stationary law exists.
    """
    total = _check_cap(net.n, motif.k, cap)
    w = np.empty(total)
    pos = 0
    for X in _chunk_maps(net.n, motif.k):
        w[pos:pos + X.shape[0]] = _map_weights(motif, net, X)
        pos += X.shape[0]
    Z = float(w.sum())
    if Z <= 0.0:
        raise ValueError("t(F, G) = 0; the stationary law is undefined")
    return ExactDistribution(probs=w / Z, partition=Z, n=net.n, k=motif.k)


def conditional_density(obs_motif, net, cond_motif, cap=ENUM_CAP):
    """t(H, G | F) = t(H + F, G) / t(F, G); zero when the denominator is."""
    if obs_motif.k != cond_motif.k:
        raise ValueError("observable and conditioning motifs must share k")
    denom = hom_density(cond_motif, net, cap=cap)
    if denom == 0.0:
        return 0.0
    num = hom_density(obs_motif.add(cond_motif), net, cap=cap)
    return num / denom


def exact_macc(motif, net, cap=ENUM_CAP):
    """k x k matrix of conditional edge densities given the motif.

    Entry (i, j) is the conditional density of the motif with one extra
    exponent at (i, j); where the motif already has a positive entry the
    augmented motif is the motif itself, so the entry is pinned to 1.
    Everything is 0 when t(F, G) = 0.
    """
    k = motif.k
    _check_cap(net.n, k, cap)
    A = net.dense_weights()
    F = motif.weights
    free = [(i, j) for i in range(k) for j in range(k) if F[i, j] == 0.0]
    S = np.zeros((k, k))
    Z = 0.0
    for X in _chunk_maps(net.n, k):
        w = _map_weights(motif, net, X)
        Z += float(w.sum())
        if not w.any():
            continue
        for i, j in free:
            S[i, j] += float((w * A[X[:, i], X[:, j]]).sum())
    if Z == 0.0:
        return np.zeros((k, k))
    M = S / Z
    for i in range(k):
        for j in range(k):
            if F[i, j] > 0.0:
                M[i, j] = 1.0
    return M


def exact_profile(obs_motif, net, cond_motif, grid, cap=ENUM_CAP):
    """Conditional profile on a grid of thresholds.

    f(t) is the stationary probability that every edge factor of the
    observable motif is at least t, the factor at (i, j) being
    A(x(i), x(j)) ** H(i, j) over positive entries of H.  With no positive
    entries the profile is identically 1.  When t(F, G) = 0 the profile is
    the zero function.
    """
    if obs_motif.k != cond_motif.k:
        raise ValueError("observable and conditioning motifs must share k")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.shape[0] == 0:
        raise ValueError("grid must be a nonempty 1-d array")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be nondecreasing")
    A = net.dense_weights()
    edges = obs_motif.edges()
    m = grid.shape[0]
    hist = np.zeros(m + 1)
    Z = 0.0
    _check_cap(net.n, cond_motif.k, cap)
    for X in _chunk_maps(net.n, cond_motif.k):
        w = _map_weights(cond_motif, net, X)
        Z += float(w.sum())
        if not w.any():
            continue
        if edges:
            mins = np.full(X.shape[0], np.inf)
            for i, j, e in edges:
                vals = A[X[:, i], X[:, j]]
                np.minimum(mins, vals if e == 1.0 else vals ** e, out=mins)
        else:
            mins = np.full(X.shape[0], np.inf)
        c = np.searchsorted(grid, mins, side="right")
        hist += np.bincount(c, weights=w, minlength=m + 1)
    if Z == 0.0:
        return np.zeros(m)
    # f[j] = mass with min >= grid[j] = mass landing strictly right of bin j
    suffix = np.cumsum(hist[::-1])[::-1]
    return suffix[1:] / Z


def profile_atoms(obs_motif, net, cond_motif, cap=10 ** 7):
    """Support of the minimum edge factor under the conditioning law.

    Returns (values, masses, Z): ascending distinct minima (inf when the
    observable has no positive entries), their stationary probabilities, and
    the partition value.  Z = 0 comes back as empty arrays.
    """
    if obs_motif.k != cond_motif.k:
        raise ValueError("observable and conditioning motifs must share k")
    _check_cap(net.n, cond_motif.k, cap)
    A = net.dense_weights()
    edges = obs_motif.edges()
    chunks_v = []
    chunks_w = []
    Z = 0.0
    for X in _chunk_maps(net.n, cond_motif.k):
        w = _map_weights(cond_motif, net, X)
        Z += float(w.sum())
        live = w > 0
        if not live.any():
            continue
        mins = np.full(int(live.sum()), np.inf)
        Xl = X[live]
        for i, j, e in edges:
            vals = A[Xl[:, i], Xl[:, j]]
            np.minimum(mins, vals if e == 1.0 else vals ** e, out=mins)
        chunks_v.append(mins)
        chunks_w.append(w[live])
    if Z == 0.0:
        return np.empty(0), np.empty(0), 0.0
    v = np.concatenate(chunks_v)
    w = np.concatenate(chunks_w)
    uniq, inverse = np.unique(v, return_inverse=True)
    masses = np.bincount(inverse, weights=w, minlength=uniq.shape[0]) / Z
    return uniq, masses, Z


def exact_transform(motif, net, cap=ENUM_CAP):
    """Joint law of the first and last motif nodes, as a new network.

    The returned weight matrix has total mass 1; node weights carry over
    unchanged.  Needs k >= 2 and t(F, G) > 0.
    """
    k = motif.k
    if k < 2:
        raise ValueError("motif transform needs k >= 2")
    _check_cap(net.n, k, cap)
    M = np.zeros((net.n, net.n))
    Z = 0.0
    for X in _chunk_maps(net.n, k):
        w = _map_weights(motif, net, X)
        Z += float(w.sum())
        if w.any():
            np.add.at(M, (X[:, 0], X[:, k - 1]), w)
    if Z == 0.0:
        raise ValueError("t(F, G) = 0; the motif transform is undefined")
    return Network(M / Z, net.alpha)


def tv_distance(p, q):
    """Total variation distance between two finite distributions."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise ValueError("distributions must have equal length")
    return 0.5 * float(np.abs(p - q).sum())
