"""Step kernels on [0, 1] and distances between them.

A step kernel is a block-constant function on the unit square: an m x m value
matrix together with block masses summing to one.  Networks embed as step
kernels, which makes the cut distance and its relatives computable desk
checks for the counting, conditional, transform, and profile bounds.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import exact_oracle
from .netcore import Network

CUT_NORM_MAX_BLOCKS = 20
DELTA_MAX_BLOCKS = 9


@dataclass
class StepKernel:
    values: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.values, dtype=float)
        mu = np.asarray(self.masses, dtype=float).reshape(-1)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise ValueError("values must be square")
        if V.shape[0] != mu.shape[0]:
            raise ValueError("masses must match the block count")
        if np.any(mu <= 0):
            raise ValueError("block masses must be strictly positive")
        s = mu.sum()
        if abs(s - 1.0) > 1e-9:
            warnings.warn(f"block masses sum to {s:.6g}; renormalizing", stacklevel=3)
            mu = mu / s
        object.__setattr__(self, "values", V)
        object.__setattr__(self, "masses", mu)

    @property
    def m(self):
        return self.values.shape[0]

    @classmethod
    def from_network(cls, net):
        return cls(net.dense_weights(), net.alpha)

    def as_network(self):
        if self.values.min() < 0:
            raise ValueError("negative values; not a network")
        return Network(self.values, self.masses)

    def permuted(self, perm):
        perm = np.asarray(perm, dtype=int)
        return StepKernel(self.values[np.ix_(perm, perm)], self.masses[perm])


def lp_norm(kernel, p):
    """Integral p-norm of the kernel over the unit square."""
    if p < 1:
        raise ValueError("p must be at least 1")
    mu = kernel.masses
    cells = np.abs(kernel.values) ** p * np.outer(mu, mu)
    return float(cells.sum()) ** (1.0 / p)


def cut_norm(kernel):
    """Exact cut norm: the largest absolute integral over a product of
    block-union sets, found by walking row subsets in Gray-code order."""
    m = kernel.m
    if m > CUT_NORM_MAX_BLOCKS:
        raise ValueError(f"cut norm capped at {CUT_NORM_MAX_BLOCKS} blocks, got {m}")
    mu = kernel.masses
    M = kernel.values * np.outer(mu, mu)
    R = np.zeros(m)
    inside = np.zeros(m, dtype=bool)
    best = 0.0
    for i in range(1, 1 << m):
        j = (i & -i).bit_length() - 1
        if inside[j]:
            R -= M[j]
            inside[j] = False
        else:
            R += M[j]
            inside[j] = True
        pos = R[R > 0].sum()
        neg = R[R < 0].sum()
        best = max(best, pos, -neg)
    return float(best)


def common_refinement(mu, nu):
    """Split [0, 1] by both partitions' boundaries.

    Returns (masses, idx_u, idx_v): cell widths plus, per cell, the index of
    the block it lies in under each of the two partitions.
    """
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    cu = np.concatenate([[0.0], np.cumsum(mu)])
    cv = np.concatenate([[0.0], np.cumsum(nu)])
    cu[-1] = cv[-1] = 1.0
    masses, idx_u, idx_v = [], [], []
    i = j = 0
    lo = 0.0
    while i < mu.shape[0] and j < nu.shape[0]:
        hi = min(cu[i + 1], cv[j + 1])
        if hi > lo + 1e-15:
            masses.append(hi - lo)
            idx_u.append(i)
            idx_v.append(j)
        lo = hi
        if cu[i + 1] <= hi + 1e-15:
            i += 1
        if cv[j + 1] <= hi + 1e-15:
            j += 1
    return np.array(masses), np.array(idx_u, dtype=int), np.array(idx_v, dtype=int)


def refine_pair(U, W):
    """Both kernels re-expressed on their common refinement."""
    masses, iu, iv = common_refinement(U.masses, W.masses)
    VU = U.values[np.ix_(iu, iu)]
    VW = W.values[np.ix_(iv, iv)]
    return VU, VW, masses


def random_step_kernel(rng, max_blocks, low=0.0, high=1.0):
    """Random symmetric step kernel: 1..max_blocks parts, values in [low, high]."""
    m = int(rng.integers(1, max_blocks + 1))
    w = rng.random(m) + 0.2
    V = rng.uniform(low, high, (m, m))
    return StepKernel((V + V.T) / 2, w / w.sum())


def random_kernel_pair(rng, max_blocks, low=0.0, high=1.0):
    """Two independent kernels sharing one block count, so the aligned
    distances apply; masses still differ between the two."""
    m = int(rng.integers(1, max_blocks + 1))
    out = []
    for _ in range(2):
        w = rng.random(m) + 0.2
        V = rng.uniform(low, high, (m, m))
        out.append(StepKernel((V + V.T) / 2, w / w.sum()))
    return out[0], out[1]


def _difference_kernel(U, W):
    VU, VW, masses = refine_pair(U, W)
    return StepKernel(VU - VW, masses)


def _perm_iter(m):
    if m > DELTA_MAX_BLOCKS:
        raise ValueError(f"alignment search capped at {DELTA_MAX_BLOCKS} blocks, got {m}")
    return itertools.permutations(range(m))


def _aligned_min(U, W, dist_fn):
    if U.m != W.m:
        raise ValueError("kernels must have equal block counts for alignment")
    best = math.inf
    for perm in _perm_iter(W.m):
        best = min(best, dist_fn(U, W.permuted(list(perm))))
        if best == 0.0:
            break
    return best


def delta_p(U, W, p):
    """Smallest integral p-norm of the difference over block relabelings."""
    return _aligned_min(U, W, lambda a, b: lp_norm(_difference_kernel(a, b), p))


def delta_cut(U, W):
    """Smallest cut norm of the difference over block relabelings."""
    return _aligned_min(U, W, lambda a, b: cut_norm(_difference_kernel(a, b)))


def _stacked_cut_norms(stack, masses):
    """Cut norms of several kernels on one shared partition, one subset walk."""
    levels, m = stack.shape[0], stack.shape[1]
    if m > CUT_NORM_MAX_BLOCKS:
        raise ValueError(f"cut norm capped at {CUT_NORM_MAX_BLOCKS} blocks, got {m}")
    M = stack * np.outer(masses, masses)[None, :, :]
    R = np.zeros((levels, m))
    inside = np.zeros(m, dtype=bool)
    best = np.zeros(levels)
    for i in range(1, 1 << m):
        j = (i & -i).bit_length() - 1
        if inside[j]:
            R -= M[:, j]
            inside[j] = False
        else:
            R += M[:, j]
            inside[j] = True
        np.maximum(best, np.where(R > 0, R, 0.0).sum(axis=1), out=best)
        np.maximum(best, -np.where(R < 0, R, 0.0).sum(axis=1), out=best)
    return best


def indicator_cut_integral(U, W):
    """Integral over thresholds of the cut norm between level indicators.

    Both kernels must take values in [0, 1].  Exact: the integrand is
    constant between consecutive distinct values, so one stacked subset
    walk over all of them covers the whole integral.
    """
    for K in (U, W):
        if K.values.min() < -1e-12 or K.values.max() > 1.0 + 1e-12:
            raise ValueError("indicator distance needs values in [0, 1]")
    VU, VW, masses = refine_pair(U, W)
    levels = np.unique(np.concatenate([[0.0], VU.ravel(), VW.ravel()]))
    if levels.shape[0] < 2:
        return 0.0
    bs = levels[1:]
    stack = (VU[None, :, :] >= bs[:, None, None]).astype(float) \
        - (VW[None, :, :] >= bs[:, None, None]).astype(float)
    norms = _stacked_cut_norms(stack, masses)
    return float(np.sum(np.diff(levels) * norms))


def delta_indicator(U, W):
    """Smallest indicator cut integral over block relabelings."""
    return _aligned_min(U, W, indicator_cut_integral)


# -- motif quantities on kernels -------------------------------------------

def kernel_hom_density(motif, kernel):
    """Motif density in a nonnegative step kernel; same formula as networks."""
    return exact_oracle.hom_density(motif, kernel.as_network())


def kernel_conditional_density(obs_motif, kernel, cond_motif):
    return exact_oracle.conditional_density(obs_motif, kernel.as_network(), cond_motif)


def kernel_transform(motif, kernel):
    """Motif transform as a step kernel, density convention.

    The network transform carries cell masses; dividing by the block areas
    turns it into a kernel that integrates to one.
    """
    net = exact_oracle.exact_transform(motif, kernel.as_network())
    mu = net.alpha
    vals = net.dense_weights() / np.outer(mu, mu)
    return StepKernel(vals, mu)


def kernel_profile_atoms(obs_motif, kernel, cond_motif):
    """Distinct minimum edge factors and masses under the conditioning law."""
    vals, masses, Z = exact_oracle.profile_atoms(obs_motif, kernel.as_network(),
                                                cond_motif)
    return vals, masses, Z


def _survival(vals, masses, t):
    return float(masses[vals >= t].sum())


def profile_l1_between_atoms(atoms_u, atoms_w):
    """Exact integral of the gap between two step survival functions."""
    vu, mu_u, zu = atoms_u
    vw, mu_w, zw = atoms_w
    fin_u = vu[np.isfinite(vu)] if vu.size else np.empty(0)
    fin_w = vw[np.isfinite(vw)] if vw.size else np.empty(0)
    tail_u = _survival(vu, mu_u, np.inf) if vu.size else 0.0
    tail_w = _survival(vw, mu_w, np.inf) if vw.size else 0.0
    if abs(tail_u - tail_w) > 1e-15:
        return math.inf
    breaks = np.unique(np.concatenate([[0.0], fin_u, fin_w]))
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        fu = _survival(vu, mu_u, b) if vu.size else 0.0
        fw = _survival(vw, mu_w, b) if vw.size else 0.0
        total += (b - a) * abs(fu - fw)
    return float(total)


def kernel_profile_l1_distance(obs_motif, cond_motif, U, W):
    """Exact L1 gap between the conditional profiles of two kernels."""
    return profile_l1_between_atoms(
        kernel_profile_atoms(obs_motif, U, cond_motif),
        kernel_profile_atoms(obs_motif, W, cond_motif),
    )


# -- stability checks -------------------------------------------------------

def _require_simple(motif, label):
    if not motif.is_simple():
        raise ValueError(f"{label} must be a simple motif")


def check_counting_stability(motif, U, W):
    """Motif density gap against edge count times the cut distance."""
    _require_simple(motif, "motif")
    lhs = abs(kernel_hom_density(motif, U) - kernel_hom_density(motif, W))
    rhs = motif.n_edges() * delta_cut(U, W)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12}


def check_conditional_stability(obs_motif, cond_motif, U, W):
    """Conditional density gap against the normalized cut distance bound."""
    _require_simple(obs_motif.add(cond_motif), "combined motif")
    tu = kernel_hom_density(cond_motif, U)
    tw = kernel_hom_density(cond_motif, W)
    lhs = abs(kernel_conditional_density(obs_motif, U, cond_motif)
              - kernel_conditional_density(obs_motif, W, cond_motif))
    top = max(tu, tw)
    dc = delta_cut(U, W)
    rhs = math.inf if top == 0 else 2 * obs_motif.n_edges() * dc / top
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12}


def check_transform_stability(motif, U, W):
    """Cut distance between transforms against the amplified input distance."""
    _require_simple(motif, "motif")
    tu = kernel_hom_density(motif, U)
    tw = kernel_hom_density(motif, W)
    lhs = delta_cut(kernel_transform(motif, U), kernel_transform(motif, W))
    top = max(tu, tw)
    dc = delta_cut(U, W)
    rhs = math.inf if top == 0 else (1 + 1 / top) * motif.n_edges() * dc
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12}


def check_profile_stability(obs_motif, cond_motif, U, W):
    """Profile L1 gap against the mixed cut and L1 distance bound."""
    _require_simple(obs_motif, "observable motif")
    _require_simple(cond_motif, "conditioning motif")
    _require_simple(obs_motif.add(cond_motif), "combined motif")
    tu = kernel_hom_density(cond_motif, U)
    tw = kernel_hom_density(cond_motif, W)
    lhs = kernel_profile_l1_distance(obs_motif, cond_motif, U, W)
    top = max(tu, tw)
    if top == 0:
        rhs = math.inf
    else:
        rhs = (2 * cond_motif.edge_weight_total() * delta_cut(U, W)
               + obs_motif.edge_weight_total() * delta_p(U, W, 1)) / top
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12}
