"""Spectral route to chain-motif quantities.

For a symmetric weight matrix A the matrix B = diag(sqrt(alpha)) A
diag(sqrt(alpha)) carries everything about chain motifs: the chain density is
a power sum of its eigenvalues and the chain transform is a matrix power.
Sending the chain length to infinity gives the transitive closure, a
projection onto the top eigenspace.
"""

from __future__ import annotations

import numpy as np

from .netcore import Network

TOP_GAP_TOL = 1e-9


def is_symmetric(net):
    A = net.dense_weights()
    return bool(np.array_equal(A, A.T))


def sym_weighted_matrix(net):
    """B = diag(sqrt(alpha)) A diag(sqrt(alpha))."""
    s = np.sqrt(net.alpha)
    return net.dense_weights() * np.outer(s, s)


def weighted_spectrum(net):
    """Eigenvalues (descending) and eigenvectors of B; symmetric nets only.

    Each eigenvector is oriented so its overlap with sqrt(alpha) is
    nonnegative, with the first nonzero coordinate positive breaking ties.
    """
    if not is_symmetric(net):
        raise ValueError("weighted spectrum needs symmetric edge weights")
    B = sym_weighted_matrix(net)
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    s = np.sqrt(net.alpha)
    for c in range(vecs.shape[1]):
        ov = float(s @ vecs[:, c])
        if ov < 0:
            vecs[:, c] = -vecs[:, c]
        elif ov == 0.0:
            nz = np.nonzero(vecs[:, c])[0]
            if nz.size and vecs[nz[0], c] < 0:
                vecs[:, c] = -vecs[:, c]
    return vals, vecs


def chain_density_spectral(k, net):
    """t of the k-node chain via the eigenvalue power sum (symmetric nets)."""
    if k < 1:
        raise ValueError("chain needs k >= 1")
    vals, vecs = weighted_spectrum(net)
    ov = np.sqrt(net.alpha) @ vecs
    return float(np.sum(vals ** (k - 1) * ov ** 2))


def chain_density_direct(k, net):
    """t of the k-node chain by plain matrix powers; works for any net."""
    if k < 1:
        raise ValueError("chain needs k >= 1")
    M = _chain_mass_matrix(k, net)
    return float(M.sum())


def _chain_mass_matrix(k, net):
    """diag(alpha) (A diag(alpha))^(k-1); entry (x, y) is the unnormalized
    mass of chains starting at x and ending at y."""
    A = net.dense_weights()
    D = np.diag(net.alpha)
    return D @ np.linalg.matrix_power(A @ D, k - 1)


def chain_transform(k, net):
    """Joint endpoint law of the k-node chain as a network, mass one.

    Symmetric nets go through the eigendecomposition; anything else falls
    back to direct matrix powers.  Needs k >= 2 and a positive chain density.
    """
    if k < 2:
        raise ValueError("chain transform needs k >= 2")
    if is_symmetric(net):
        vals, vecs = weighted_spectrum(net)
        s = np.sqrt(net.alpha)
        ov = s @ vecs
        t = float(np.sum(vals ** (k - 1) * ov ** 2))
        if t <= 0:
            raise ValueError("chain density is zero; transform undefined")
        B_pow = (vecs * vals ** (k - 1)) @ vecs.T
        M = B_pow * np.outer(s, s) / t
    else:
        M = _chain_mass_matrix(k, net)
        t = float(M.sum())
        if t <= 0:
            raise ValueError("chain density is zero; transform undefined")
        M = M / t
    M[(M < 0) & (M > -1e-10)] = 0.0
    return Network(M, net.alpha)


def top_multiplicity(vals, tol=TOP_GAP_TOL):
    """How many eigenvalues tie with the largest, within a relative gap."""
    vals = np.asarray(vals, dtype=float)
    lam1 = vals[0]
    return int(np.sum(lam1 - vals <= tol * max(1.0, abs(lam1))))


def transitive_closure(net, tol=TOP_GAP_TOL):
    """Long-chain limit of the chain transforms, as a network.

    Projects sqrt(alpha)-weighted mass onto the top eigenspace of B.  Only
    defined for symmetric weights; asymmetric input is refused.
    """
    if not is_symmetric(net):
        raise ValueError("transitive closure needs symmetric edge weights")
    vals, vecs = weighted_spectrum(net)
    r = top_multiplicity(vals, tol=tol)
    V = vecs[:, :r]
    s = np.sqrt(net.alpha)
    ov = V.T @ s
    denom = float(ov @ ov)
    if denom <= 0:
        raise ValueError("top eigenspace carries no node mass")
    P = V @ V.T
    M = (P * np.outer(s, s)) / denom
    neg = M < 0
    if np.any(M[neg] < -1e-10):
        raise ValueError("top eigenspace projection produced negative mass")
    M[neg] = 0.0
    return Network(M, net.alpha)
