"""Streaming time-average estimators fed by the embedding chains.

Each accumulator consumes chain states one at a time or in replica batches
and produces the corresponding long-run observable: conditional densities,
threshold profiles, average-connection matrices, and pair-law transforms.
All of them merge associatively so replica runs can be combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .netcore import Network


def default_profile_grid(points=101):
    """Equispaced threshold grid on [0, 1]."""
    if points < 2:
        raise ValueError("grid needs at least two points")
    return np.linspace(0.0, 1.0, points)


@dataclass
class ProfileResult:
    ts: np.ndarray
    values: np.ndarray


def profile_l1_distance(p, q):
    """Trapezoidal integral of |p - q| over the shared grid."""
    if p.ts.shape != q.ts.shape or not np.array_equal(p.ts, q.ts):
        raise ValueError("profile grids differ")
    return float(np.trapezoid(np.abs(p.values - q.values), p.ts))


def _pair_gather(A, rows, cols):
    """A[rows, cols] elementwise for dense or CSR storage."""
    if isinstance(A, np.ndarray):
        return A[rows, cols]
    return np.asarray(A[rows, cols]).ravel()


def _edge_factor_product(A, edges, X):
    w = np.ones(X.shape[0])
    for i, j, e in edges:
        f = _pair_gather(A, X[:, i], X[:, j])
        w = w * (f if e == 1.0 else f ** e)
    return w


class ChdEstimator:
    """Running mean of the extra-edges weight product over chain states.

    The long-run value is the conditional density of the observed motif on
    top of whatever motif the chain embeds.
    """

    def __init__(self, obs_motif, net):
        self.obs_motif = obs_motif
        self.net = net
        self._A = net.weights
        self._edges = obs_motif.edges()
        self.total = 0.0
        self.count = 0

    def update(self, x):
        self.update_batch(np.asarray(x, dtype=int)[None, :])

    def update_batch(self, X):
        if X.shape[1] != self.obs_motif.k:
            raise ValueError("state length does not match the observed motif")
        self.total += float(_edge_factor_product(self._A, self._edges, X).sum())
        self.count += X.shape[0]

    def merge(self, other):
        if other.obs_motif is not self.obs_motif and not np.array_equal(
                other.obs_motif.weights, self.obs_motif.weights):
            raise ValueError("cannot merge estimators of different motifs")
        self.total += other.total
        self.count += other.count
        return self

    def result(self):
        if self.count == 0:
            raise ValueError("no samples accumulated")
        return self.total / self.count


class ProfileEstimator:
    """Running survival curve of the smallest extra-edge factor.

    Value at threshold t is the fraction of visited states whose every
    observed-motif factor is at least t; with no observed edges the curve
    is identically 1.
    """

    def __init__(self, obs_motif, net, grid=None):
        self.obs_motif = obs_motif
        self.net = net
        self._A = net.weights
        self._edges = obs_motif.edges()
        self.grid = default_profile_grid() if grid is None else np.asarray(grid, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape[0] < 2:
            raise ValueError("grid must be a 1-d array with at least two points")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        self._cells = np.zeros(self.grid.shape[0] + 1, dtype=np.int64)
        self.count = 0

    def update(self, x):
        self.update_batch(np.asarray(x, dtype=int)[None, :])

    def update_batch(self, X):
        if X.shape[1] != self.obs_motif.k:
            raise ValueError("state length does not match the observed motif")
        mins = np.full(X.shape[0], np.inf)
        for i, j, e in self._edges:
            f = _pair_gather(self._A, X[:, i], X[:, j])
            np.minimum(mins, f if e == 1.0 else f ** e, out=mins)
        idx = np.searchsorted(self.grid, mins, side="right")
        self._cells += np.bincount(idx, minlength=self._cells.shape[0])
        self.count += X.shape[0]

    def merge(self, other):
        if not np.array_equal(other.grid, self.grid):
            raise ValueError("cannot merge estimators on different grids")
        self._cells += other._cells
        self.count += other.count
        return self

    def result(self):
        if self.count == 0:
            raise ValueError("no samples accumulated")
        above = np.cumsum(self._cells[::-1])[::-1]
        return ProfileResult(ts=self.grid.copy(),
                             values=above[1:] / self.count)


class MaccEstimator:
    """Running mean of every pairwise connection weight along the chain.

    Entries sitting on chain-motif edges are pinned to 1 instead of being
    estimated, since their long-run value is 1 by construction.
    """

    def __init__(self, chain_motif, net):
        self.chain_motif = chain_motif
        self.net = net
        self._A = net.weights
        k = chain_motif.k
        self._sum = np.zeros((k, k))
        self.count = 0

    def update(self, x):
        self.update_batch(np.asarray(x, dtype=int)[None, :])

    def update_batch(self, X):
        k = self.chain_motif.k
        if X.shape[1] != k:
            raise ValueError("state length does not match the chain motif")
        rows = np.broadcast_to(X[:, :, None], (X.shape[0], k, k))
        cols = np.broadcast_to(X[:, None, :], (X.shape[0], k, k))
        vals = _pair_gather(self._A, rows.ravel(), cols.ravel())
        self._sum += vals.reshape(X.shape[0], k, k).sum(axis=0)
        self.count += X.shape[0]

    def merge(self, other):
        if not np.array_equal(other.chain_motif.weights, self.chain_motif.weights):
            raise ValueError("cannot merge estimators of different motifs")
        self._sum += other._sum
        self.count += other.count
        return self

    def result(self):
        if self.count == 0:
            raise ValueError("no samples accumulated")
        M = self._sum / self.count
        M[self.chain_motif.weights > 0] = 1.0
        return M


class TransformEstimator:
    """Accumulates extra-motif-weighted visit mass at the end-node pair.

    With a zero weight motif this estimates the pair law of the chain
    motif's first and last node; the result is 1-normalized and returned
    as a Network with the original node weights.
    """

    def __init__(self, chain_motif, net, weight_motif=None):
        if chain_motif.k < 2:
            raise ValueError("transform needs a motif on at least two nodes")
        if weight_motif is not None and weight_motif.k != chain_motif.k:
            raise ValueError("weight motif must share the chain motif node count")
        self.chain_motif = chain_motif
        self.net = net
        self._A = net.weights
        self._edges = weight_motif.edges() if weight_motif is not None else []
        self._mass = np.zeros((net.n, net.n))
        self.count = 0

    def update(self, x):
        self.update_batch(np.asarray(x, dtype=int)[None, :])

    def update_batch(self, X):
        if X.shape[1] != self.chain_motif.k:
            raise ValueError("state length does not match the chain motif")
        w = _edge_factor_product(self._A, self._edges, X)
        np.add.at(self._mass, (X[:, 0], X[:, -1]), w)
        self.count += X.shape[0]

    def merge(self, other):
        if not np.array_equal(other.chain_motif.weights, self.chain_motif.weights):
            raise ValueError("cannot merge estimators of different motifs")
        self._mass += other._mass
        self.count += other.count
        return self

    def result(self):
        total = self._mass.sum()
        if total <= 0:
            raise ValueError("no transform mass accumulated")
        return Network(self._mass / total, self.net.alpha)
