"""Core types for weighted networks and motifs.

A network is a node set [n] with a nonnegative edge weight matrix A and a
strictly positive node weight vector alpha summing to one.  A motif is a small
edge-weighted graph whose positive entries act as exponents on the network
weights.  Everything downstream (exact enumeration, the samplers, the
observables) builds on the two classes here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as _sparse

# networks above this size are stored sparse (CSR); below, dense float64
DENSE_NODE_LIMIT = 4096

ALPHA_TOL = 1e-9


class ConfigError(ValueError):
    """Bad user-facing configuration (CLI exit code 2)."""


class InitializationError(RuntimeError):
    """Sampler could not be initialized (CLI exit code 3)."""


def _as_alpha(alpha, n):
    a = np.asarray(alpha, dtype=float).reshape(-1)
    if a.shape != (n,):
        raise ValueError(f"alpha has shape {a.shape}, expected ({n},)")
    if not np.all(np.isfinite(a)):
        raise ValueError("alpha contains non-finite entries")
    if np.any(a <= 0):
        raise ValueError("alpha entries must be strictly positive")
    s = a.sum()
    if abs(s - 1.0) > ALPHA_TOL:
        warnings.warn(f"node weights sum to {s:.6g}; renormalizing", stacklevel=3)
        a = a / s
    return a


class Network:
    """Weighted directed network ([n], A, alpha).

    A is any nonnegative square matrix; alpha is strictly positive and is
    renormalized (with a warning) when its sum drifts from 1 beyond 1e-9.
    Dense storage up to DENSE_NODE_LIMIT nodes, scipy CSR beyond that.
    """

    def __init__(self, weights, alpha=None):
        if _sparse.issparse(weights):
            W = weights.tocsr().astype(float)
            if W.shape[0] != W.shape[1]:
                raise ValueError("weight matrix must be square")
            if W.nnz and W.data.min() < 0:
                raise ValueError("edge weights must be nonnegative")
            if W.nnz and not np.all(np.isfinite(W.data)):
                raise ValueError("edge weights contain non-finite entries")
            n = W.shape[0]
            if n <= DENSE_NODE_LIMIT:
                W = np.asarray(W.todense(), dtype=float)
        else:
            W = np.asarray(weights, dtype=float)
            if W.ndim != 2 or W.shape[0] != W.shape[1]:
                raise ValueError("weight matrix must be square")
            if not np.all(np.isfinite(W)):
                raise ValueError("edge weights contain non-finite entries")
            if W.size and W.min() < 0:
                raise ValueError("edge weights must be nonnegative")
            n = W.shape[0]
            if n > DENSE_NODE_LIMIT:
                W = _sparse.csr_matrix(W)
        if n == 0:
            raise ValueError("network needs at least one node")
        self.n = n
        self.weights = W
        if alpha is None:
            self.alpha = np.full(n, 1.0 / n)
        else:
            self.alpha = _as_alpha(alpha, n)

    # -- accessors ----------------------------------------------------------

    @property
    def is_dense(self):
        return not _sparse.issparse(self.weights)

    def dense_weights(self):
        """Edge weights as a dense ndarray (materializes sparse storage)."""
        if self.is_dense:
            return self.weights
        return np.asarray(self.weights.todense(), dtype=float)

    def out_row(self, i):
        if self.is_dense:
            return self.weights[i]
        return self.weights.getrow(i).toarray().ravel()

    def in_col(self, j):
        if self.is_dense:
            return self.weights[:, j]
        return self.weights.getcol(j).toarray().ravel()

    def entry(self, i, j):
        return float(self.weights[i, j])

    def diagonal(self):
        if self.is_dense:
            return np.diag(self.weights).copy()
        return self.weights.diagonal()

    def max_weight(self):
        if self.is_dense:
            return float(self.weights.max()) if self.weights.size else 0.0
        return float(self.weights.data.max()) if self.weights.nnz else 0.0

    def copy_with(self, weights=None, alpha=None):
        return Network(self.weights if weights is None else weights,
                       self.alpha if alpha is None else alpha)

    def __repr__(self):
        kind = "dense" if self.is_dense else "sparse"
        return f"Network(n={self.n}, {kind})"


@dataclass(frozen=True)
class Motif:
    """Small edge-weighted graph; positive entries are exponents on A."""

    weights: np.ndarray
    name: str = ""

    def __post_init__(self):
        W = np.asarray(self.weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("motif weight matrix must be square")
        if not np.all(np.isfinite(W)) or (W.size and W.min() < 0):
            raise ValueError("motif weights must be finite and nonnegative")
        object.__setattr__(self, "weights", W)

    @property
    def k(self):
        return self.weights.shape[0]

    def edges(self):
        """Positive entries as a list of (i, j, exponent)."""
        ii, jj = np.nonzero(self.weights)
        return [(int(i), int(j), float(self.weights[i, j])) for i, j in zip(ii, jj)]

    def n_edges(self):
        return int(np.count_nonzero(self.weights))

    def edge_weight_total(self):
        return float(self.weights.sum())

    def add(self, other):
        """Entrywise sum of two motifs on the same node set."""
        if other.k != self.k:
            raise ValueError("motifs must share the node count")
        return Motif(self.weights + other.weights)

    def is_simple(self):
        W = self.weights
        k = self.k
        if not np.all((W == 0) | (W == 1)):
            return False
        if np.any(np.diag(W) != 0):
            return False
        for i in range(k):
            for j in range(i + 1, k):
                if W[i, j] + W[j, i] not in (0.0, 1.0):
                    return False
        return True

    def is_rooted_tree(self):
        """True when positive entries are exactly one parent edge (p, i), p < i,
        per non-root node, in depth-first order."""
        W = self.weights
        k = self.k
        if k == 1:
            return not W.any()
        if np.count_nonzero(W) != k - 1:
            return False
        for i in range(1, k):
            col = np.nonzero(W[:, i])[0]
            if len(col) != 1 or col[0] >= i:
                return False
        if W[:, 0].any():
            return False
        return True

    def parents(self):
        """Parent index per node (root gets -1); requires a rooted tree."""
        if not self.is_rooted_tree():
            raise ValueError("motif is not a rooted tree")
        par = np.full(self.k, -1, dtype=int)
        for i in range(1, self.k):
            par[i] = int(np.nonzero(self.weights[:, i])[0][0])
        return par

    def max_degree(self):
        W = self.weights
        sup = (W + W.T) > 0
        np.fill_diagonal(sup, np.diag(W) > 0)
        return int(sup.sum(axis=1).max()) if self.k else 0

    def __repr__(self):
        return f"Motif(k={self.k}, name={self.name or '?'})"


# -- motif families ---------------------------------------------------------

def path_motif(k):
    """Directed path on k nodes, edges (i, i+1)."""
    if k < 1:
        raise ValueError("path motif needs k >= 1")
    W = np.zeros((k, k))
    for i in range(k - 1):
        W[i, i + 1] = 1.0
    return Motif(W, name=f"P_{k}")


def cycle_motif(k):
    if k < 1:
        raise ValueError("cycle motif needs k >= 1")
    W = np.zeros((k, k))
    for i in range(k):
        W[i, (i + 1) % k] += 1.0
    return Motif(W, name=f"C_{k}")


def star_motif(d):
    """Star with d leaves, center node 0."""
    if d < 0:
        raise ValueError("star motif needs d >= 0")
    W = np.zeros((d + 1, d + 1))
    W[0, 1:] = 1.0
    return Motif(W, name=f"S_{d}")


def wedge_motif():
    return Motif(np.array([[0.0, 1, 1], [0, 0, 0], [0, 0, 0]]), name="W_3")


def complete_motif(q):
    """Complete simple motif on q nodes, upper-triangular orientation."""
    if q < 1:
        raise ValueError("complete motif needs q >= 1")
    W = np.triu(np.ones((q, q)), k=1)
    return Motif(W, name=f"K_{q}")


def two_arm_motif(k1, k2):
    """Rooted tree of two directed paths of lengths k1 and k2 from node 0."""
    if k1 < 0 or k2 < 0:
        raise ValueError("arm lengths must be nonnegative")
    k = k1 + k2 + 1
    W = np.zeros((k, k))
    for i in range(k1):
        W[i, i + 1] = 1.0
    if k2 > 0:
        W[0, k1 + 1] = 1.0
        for i in range(k1 + 1, k1 + k2):
            W[i, i + 1] = 1.0
    return Motif(W, name=f"F_{k1}_{k2}")


def arm_edge_motif(k1, k2):
    """Single-edge companion of two_arm_motif on the same node set.

    Both arms present: the edge joins the two arm ends.  Exactly one arm:
    the edge runs from the root to the arm end, closing the path into a
    cycle.  No arms: a self-loop at node 0.
    """
    if k1 < 0 or k2 < 0:
        raise ValueError("arm lengths must be nonnegative")
    k = k1 + k2 + 1
    W = np.zeros((k, k))
    if k1 > 0 and k2 > 0:
        W[k1, k1 + k2] = 1.0
    elif k1 + k2 > 0:
        W[0, k1 + k2] = 1.0
    else:
        W[0, 0] = 1.0
    return Motif(W, name=f"H_{k1}_{k2}")


_FAMILY_PREFIXES = ("P_", "C_", "S_", "K_", "F_", "H_", "W_")


def motif_from_name(token):
    """Parse family tokens like P_5, C_3, S_20, K_7, W_3, F_3_4, H_0_0."""
    parts = token.split("_")
    try:
        if parts[0] == "P" and len(parts) == 2:
            return path_motif(int(parts[1]))
        if parts[0] == "C" and len(parts) == 2:
            return cycle_motif(int(parts[1]))
        if parts[0] == "S" and len(parts) == 2:
            return star_motif(int(parts[1]))
        if parts[0] == "K" and len(parts) == 2:
            return complete_motif(int(parts[1]))
        if parts[0] == "W" and len(parts) == 2 and parts[1] == "3":
            return wedge_motif()
        if parts[0] == "F" and len(parts) == 3:
            return two_arm_motif(int(parts[1]), int(parts[2]))
        if parts[0] == "H" and len(parts) == 3:
            return arm_edge_motif(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"bad motif token {token!r}: {exc}") from None
    raise ConfigError(f"unknown motif token {token!r}")


# -- predicates on networks -------------------------------------------------

def _support_components(adj_bool):
    """Connected component labels of an undirected boolean adjacency."""
    n = adj_bool.shape[0]
    labels = np.full(n, -1, dtype=int)
    cur = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        stack = [s]
        labels[s] = cur
        while stack:
            v = stack.pop()
            for u in np.nonzero(adj_bool[v])[0]:
                if labels[u] < 0:
                    labels[u] = cur
                    stack.append(int(u))
        cur += 1
    return labels


def is_irreducible(net):
    """Support of max(A, A^T) is connected."""
    A = net.dense_weights()
    sym = (np.maximum(A, A.T) > 0)
    np.fill_diagonal(sym, False)
    labels = _support_components(sym)
    return bool(labels.max() == 0)


def is_bidirectional(net):
    A = net.dense_weights()
    return bool(np.array_equal(A > 0, A.T > 0))


def skeleton(net):
    """0-1 matrix of mutually positive pairs, min(A, A^T) > 0."""
    A = net.dense_weights()
    return (np.minimum(A, A.T) > 0).astype(float)


def has_odd_cycle(net):
    """Skeleton contains an odd cycle (checked on every component)."""
    S = skeleton(net) > 0
    n = net.n
    if np.any(np.diag(S)):
        return True
    off = S.copy()
    np.fill_diagonal(off, False)
    color = np.full(n, -1, dtype=int)
    for s in range(n):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in np.nonzero(off[v])[0]:
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    stack.append(int(u))
                elif color[u] == color[v]:
                    return True
    return False


def max_degree(net):
    """Max count of b with A(a,b) + A(b,a) > 0; a self-loop counts once."""
    A = net.dense_weights()
    sup = (A + A.T) > 0
    return int(sup.sum(axis=1).max())


def diameter(net):
    """Longest directed BFS distance on the positive support; inf if some
    ordered pair is unreachable."""
    A = net.dense_weights()
    adj = [np.nonzero(A[v] > 0)[0] for v in range(net.n)]
    worst = 0
    for s in range(net.n):
        dist = np.full(net.n, -1, dtype=int)
        dist[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if dist[u] < 0:
                        dist[u] = dist[v] + 1
                        nxt.append(int(u))
            frontier = nxt
        if dist.min() < 0:
            return math.inf
        worst = max(worst, int(dist.max()))
    return worst


def hom_weight(motif, net, x):
    """Unnormalized stationary weight of a vertex map x, including alpha."""
    x = np.asarray(x, dtype=int)
    w = 1.0
    for i, j, e in motif.edges():
        a = net.entry(x[i], x[j])
        w *= a if e == 1.0 else a ** e
        if w == 0.0:
            return 0.0
    return w * float(np.prod(net.alpha[x]))


# -- file formats -----------------------------------------------------------

def save_network(net, path):
    """Tab-separated 1-based edge list with node weight lines.

    Lines with two fields are `node<TAB>alpha`, lines with three fields are
    `i<TAB>j<TAB>weight`.  Every node gets an alpha line so the node count
    survives round trips.
    """
    A = net.dense_weights()
    with open(path, "w") as fh:
        for i in range(net.n):
            fh.write(f"{i + 1}\t{float(net.alpha[i])!r}\n")
        ii, jj = np.nonzero(A)
        for i, j in zip(ii, jj):
            fh.write(f"{i + 1}\t{j + 1}\t{float(A[i, j])!r}\n")


def load_network(path):
    """Read the edge-list format written by save_network.

    Node weight lines are optional; absent weights mean uniform alpha.
    """
    edges = []
    alphas = {}
    n = 0
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) == 2:
                i = int(parts[0])
                alphas[i - 1] = float(parts[1])
                n = max(n, i)
            elif len(parts) == 3:
                i, j = int(parts[0]), int(parts[1])
                if i < 1 or j < 1:
                    raise ConfigError(f"{path}:{ln}: node ids are 1-based")
                edges.append((i - 1, j - 1, float(parts[2])))
                n = max(n, i, j)
            else:
                raise ConfigError(f"{path}:{ln}: expected 2 or 3 fields")
    if n == 0:
        raise ConfigError(f"{path}: no nodes found")
    if n > DENSE_NODE_LIMIT:
        ii = [e[0] for e in edges]
        jj = [e[1] for e in edges]
        vv = [e[2] for e in edges]
        W = _sparse.coo_matrix((vv, (ii, jj)), shape=(n, n)).tocsr()
    else:
        W = np.zeros((n, n))
        for i, j, v in edges:
            W[i, j] = v
    if alphas:
        if len(alphas) != n:
            raise ConfigError(f"{path}: {len(alphas)} alpha lines for {n} nodes")
        alpha = np.array([alphas[i] for i in range(n)])
    else:
        alpha = None
    return Network(W, alpha)


def save_motif(motif, path):
    with open(path, "w") as fh:
        fh.write(f"k={motif.k}\n")
        for i, j, w in motif.edges():
            fh.write(f"{i + 1}\t{j + 1}\t{float(w)!r}\n")


def load_motif(path):
    """Motif file: header `k=<int>`, then 1-based `i<TAB>j[<TAB>weight]` lines."""
    k = None
    W = None
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if k is None:
                if not line.replace(" ", "").startswith("k="):
                    raise ConfigError(f"{path}:{ln}: expected header k=<int>")
                k = int(line.split("=", 1)[1])
                if k < 1:
                    raise ConfigError(f"{path}:{ln}: k must be >= 1")
                W = np.zeros((k, k))
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ConfigError(f"{path}:{ln}: expected i j [weight]")
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            if not (0 <= i < k and 0 <= j < k):
                raise ConfigError(f"{path}:{ln}: node id out of range")
            W[i, j] = float(parts[2]) if len(parts) == 3 else 1.0
    if k is None:
        raise ConfigError(f"{path}: missing k= header")
    return Motif(W)


def resolve_motif(spec):
    """A family token, or a path to a motif file."""
    import os

    if isinstance(spec, Motif):
        return spec
    if isinstance(spec, str) and spec.startswith(_FAMILY_PREFIXES) and not os.path.exists(spec):
        return motif_from_name(spec)
    if isinstance(spec, str) and os.path.exists(spec):
        return load_motif(spec)
    raise ConfigError(f"cannot resolve motif {spec!r}")


def load_frequency_matrix(path):
    """First line is n, then n whitespace-separated rows."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ConfigError(f"{path}: empty file")
    n = int(tokens[0])
    vals = tokens[1:]
    if len(vals) != n * n:
        raise ConfigError(f"{path}: expected {n * n} entries, found {len(vals)}")
    return np.array(vals, dtype=float).reshape(n, n)


def save_frequency_matrix(M, path):
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{n}\n")
        for row in M:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
