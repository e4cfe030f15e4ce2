"""Synthetic networks and loaders for real frequency data."""

from __future__ import annotations

import numpy as np

from .netcore import ConfigError, Network, load_frequency_matrix


def torus(n):
    """n x n grid with wraparound, 0-1 weights between 4-neighbors.

    Node (r, c) sits at flat index r * n + c; node weights are uniform.
    """
    if n < 3:
        raise ValueError("torus needs n >= 3")
    N = n * n
    A = np.zeros((N, N))
    for r in range(n):
        for c in range(n):
            i = r * n + c
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                j = ((r + dr) % n) * n + (c + dc) % n
                A[i, j] = 1.0
    return Network(A)


def long_range_torus(n, p, exponent, seed):
    """Torus with random extra links between non-neighboring grid points.

    Each unordered non-adjacent pair (r, c), (r2, c2) independently gains a
    symmetric unit edge with probability p * d ** (-exponent), where d is the
    plain grid distance |r - r2| + |c - c2| without wraparound.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    base = torus(n)
    A = base.dense_weights().copy()
    rng = np.random.default_rng(seed)
    N = n * n
    for i in range(N):
        r, c = divmod(i, n)
        for j in range(i + 1, N):
            if A[i, j] > 0:
                continue
            r2, c2 = divmod(j, n)
            d = abs(r - r2) + abs(c - c2)
            if rng.random() < p * d ** (-float(exponent)):
                A[i, j] = A[j, i] = 1.0
    return Network(A)


# 6-block templates for the randomized block networks below.  The first is
# assortative (heavy diagonal); the second mixes strong asymmetric links.
ASSORTATIVE_TEMPLATE = np.ones((6, 6)) + 4.0 * np.eye(6)

SKEWED_TEMPLATE = np.array([
    [1.0, 1, 1, 5, 5, 1],
    [1, 1, 1, 1, 1, 5],
    [5, 1, 1, 5, 1, 5],
    [5, 1, 1, 1, 1, 2],
    [1, 5, 1, 1, 1, 1],
    [1, 1, 5, 10, 1, 1],
])


def gamma_block_network(template, r, sigma, seed, block_alpha=None):
    """Randomized blow-up of a block template with Gamma-distributed weights.

    Every positive template entry a becomes an r x r block of independent
    Gamma draws with mean a and standard deviation sigma; zero entries stay
    zero blocks.  The whole matrix is scaled by its maximum.  Node weights
    split each block's share evenly (uniform across blocks by default).
    """
    T = np.asarray(template, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError("template must be square")
    if np.any(T < 0):
        raise ValueError("template entries must be nonnegative")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    m = T.shape[0]
    rng = np.random.default_rng(seed)
    var = float(sigma) ** 2
    A = np.zeros((m * r, m * r))
    for i in range(m):
        for j in range(m):
            a = T[i, j]
            if a <= 0:
                continue
            shape = a * a / var
            scale = var / a
            A[i * r:(i + 1) * r, j * r:(j + 1) * r] = rng.gamma(shape, scale, size=(r, r))
    mx = A.max()
    if mx > 0:
        A = A / mx
    if block_alpha is None:
        alpha = np.full(m * r, 1.0 / (m * r))
    else:
        ba = np.asarray(block_alpha, dtype=float)
        if ba.shape != (m,):
            raise ValueError("block_alpha must have one entry per block")
        alpha = np.repeat(ba / r, r)
        alpha = alpha / alpha.sum()
    return Network(A, alpha)


def barbell(first, second, u, v):
    """Two networks joined by one symmetric unit bridge.

    Nodes of the second network are shifted past those of the first; the
    bridge links node u of the first to node v of the second.  Node weights
    are the concatenation, halved.
    """
    n1, n2 = first.n, second.n
    if not (0 <= u < n1) or not (0 <= v < n2):
        raise ValueError("bridge endpoints out of range")
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = first.dense_weights()
    A[n1:, n1:] = second.dense_weights()
    A[u, n1 + v] = A[n1 + v, u] = 1.0
    alpha = np.concatenate([first.alpha, second.alpha]) / 2.0
    return Network(A, alpha)


def erdos_renyi(n, p, seed):
    """Symmetric 0-1 network, no loops, each pair kept with probability p."""
    rng = np.random.default_rng(seed)
    U = rng.random((n, n))
    A = np.triu((U < p).astype(float), k=1)
    A = A + A.T
    return Network(A)


def complete_network(q):
    """All-ones off-diagonal weights on q nodes, uniform node weights."""
    if q < 2:
        raise ValueError("complete network needs q >= 2")
    A = np.ones((q, q)) - np.eye(q)
    return Network(A)


_NORMALIZATIONS = ("row_markov", "global_max", "log_double")


def normalize_matrix(M, mode):
    """Turn a raw count matrix into edge weights.

    row_markov: rows divided by their sums, zero rows left alone.
    global_max: the whole matrix divided by its maximum.
    log_double: log(1 + M), then divided by the maximum (display scaling).
    """
    M = np.asarray(M, dtype=float)
    if mode == "row_markov":
        sums = M.sum(axis=1, keepdims=True)
        out = np.divide(M, sums, out=np.zeros_like(M), where=sums > 0)
        return out
    if mode == "global_max":
        mx = M.max()
        return M / mx if mx > 0 else M.copy()
    if mode == "log_double":
        L = np.log1p(M)
        mx = L.max()
        return L / mx if mx > 0 else L
    raise ConfigError(f"unknown normalization {mode!r}; pick one of {_NORMALIZATIONS}")


def word_adjacency_network(path, mode="row_markov"):
    """Load a word co-occurrence frequency file as a network.

    The file holds the matrix order on its first line and the counts after;
    node weights are uniform.
    """
    M = load_frequency_matrix(path)
    return Network(normalize_matrix(M, mode))
