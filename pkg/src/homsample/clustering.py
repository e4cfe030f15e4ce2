"""Hierarchical structure of a weighted network.

Similarity above a threshold induces a partition; sweeping the threshold
gives a dendrogram.  Everything runs on the max-symmetrized weights turned
into dissimilarities (max weight minus weight, missing links infinite),
closed under shortest paths, then single linkage with tied merges coalesced
into one multiway event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class MergeEvent:
    height: float
    children: list  # cluster ids, leaves are 0..n-1, later clusters n, n+1, ...
    cluster_id: int
    leaves: list


@dataclass
class Dendrogram:
    n: int
    events: list
    merge_heights: np.ndarray  # pairwise merge height, diagonal 0


def dissimilarity_matrix(net):
    """Max-symmetrized weights flipped to dissimilarities.

    Entry (x, y) is max(A) - max(A(x,y), A(y,x)), infinite when neither
    direction carries weight, zero on the diagonal.
    """
    A = net.dense_weights()
    sym = np.maximum(A, A.T)
    mx = net.max_weight()
    D = np.where(sym > 0, mx - sym, np.inf)
    np.fill_diagonal(D, 0.0)
    return D


def shortest_path_closure(D):
    """All-pairs shortest paths of a dissimilarity matrix with infinities."""
    n = D.shape[0]
    finite = D[np.isfinite(D)]
    mx = finite.max() if finite.size else 0.0
    sentinel = n * mx + 1.0
    W = np.where(np.isfinite(D), D, sentinel)
    for k in range(n):
        np.minimum(W, W[:, [k]] + W[[k], :], out=W)
    W[W >= sentinel] = np.inf
    return W


def single_linkage(net):
    """Single-linkage dendrogram of the shortest-path dissimilarities.

    Ties coalesce: all clusters connected through edges at one height merge
    in a single multiway event.  Disconnected parts join in a final event at
    infinite height.  Events are ordered by (height, smallest leaf); children
    within an event by their smallest leaf.
    """
    return linkage_from_dissimilarity(shortest_path_closure(dissimilarity_matrix(net)))


def linkage_from_dissimilarity(D):
    """Single-linkage dendrogram of an explicit dissimilarity matrix.

    D must be square, symmetric, with a zero diagonal; np.inf marks pairs
    that never connect.  Merge heights come out equal to minimax path costs
    through D.  Tie handling and event ordering as in single_linkage.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("dissimilarity matrix must be square")
    finite_mask = np.isfinite(D)
    if not np.array_equal(finite_mask, finite_mask.T) or \
            not np.allclose(np.where(finite_mask, D, 0.0),
                            np.where(finite_mask.T, D.T, 0.0)):
        raise ValueError("dissimilarity matrix must be symmetric")
    if np.any(np.diag(D) != 0):
        raise ValueError("dissimilarity matrix needs a zero diagonal")
    n = D.shape[0]
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    cluster_of = list(range(n))  # union-find root -> current cluster id
    leaves_of = {c: [c] for c in range(n)}
    min_leaf = {c: c for c in range(n)}
    heights = np.zeros((n, n))
    events = []
    next_id = n

    iu, ju = np.triu_indices(n, k=1)
    finite = np.isfinite(D[iu, ju])
    order = np.argsort(D[iu, ju][finite], kind="stable")
    ei, ej, ew = iu[finite][order], ju[finite][order], D[iu, ju][finite][order]

    pos = 0
    m = ew.shape[0]
    while pos < m:
        h = ew[pos]
        end = pos
        while end < m and ew[end] == h:
            end += 1
        # cluster-level adjacency among the edges at this height
        adj = {}
        for t in range(pos, end):
            ca = cluster_of[find(int(ei[t]))]
            cb = cluster_of[find(int(ej[t]))]
            if ca == cb:
                continue
            adj.setdefault(ca, set()).add(cb)
            adj.setdefault(cb, set()).add(ca)
        seen = set()
        groups = []
        for c in sorted(adj, key=lambda c: min_leaf[c]):
            if c in seen:
                continue
            comp = []
            stack = [c]
            seen.add(c)
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in adj[v]:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            groups.append(sorted(comp, key=lambda c: min_leaf[c]))
        groups.sort(key=lambda g: min_leaf[g[0]])
        for grp in groups:
            all_leaves = sorted(l for c in grp for l in leaves_of[c])
            for a in range(len(grp)):
                for b in range(a + 1, len(grp)):
                    for x in leaves_of[grp[a]]:
                        for y in leaves_of[grp[b]]:
                            heights[x, y] = heights[y, x] = h
            root = find(all_leaves[0])
            for l in all_leaves[1:]:
                parent[find(l)] = root
            root = find(all_leaves[0])
            events.append(MergeEvent(height=float(h), children=list(grp),
                                     cluster_id=next_id, leaves=all_leaves))
            cluster_of[root] = next_id
            leaves_of[next_id] = all_leaves
            min_leaf[next_id] = all_leaves[0]
            next_id += 1
        pos = end

    roots = sorted({cluster_of[find(x)] for x in range(n)}, key=lambda c: min_leaf[c])
    if len(roots) > 1:
        all_leaves = list(range(n))
        for a in range(len(roots)):
            for b in range(a + 1, len(roots)):
                for x in leaves_of[roots[a]]:
                    for y in leaves_of[roots[b]]:
                        heights[x, y] = heights[y, x] = np.inf
        events.append(MergeEvent(height=math.inf, children=roots,
                                 cluster_id=next_id, leaves=all_leaves))
    return Dendrogram(n=n, events=events, merge_heights=heights)


def linkage_rows(dend):
    """Binary (height, left, right) rows; multiway events fold left to right.

    Row r creates cluster id dend.n + r, scipy style, so ids from multiway
    folding differ from the event ids on the dendrogram itself.
    """
    rows = []
    next_id = dend.n
    remap = {c: c for c in range(dend.n)}
    for ev in dend.events:
        kids = [remap[c] for c in ev.children]
        acc = kids[0]
        for c in kids[1:]:
            rows.append((ev.height, acc, c))
            acc = next_id
            next_id += 1
        remap[ev.cluster_id] = acc
    return rows


def partition_at_height(dend, h, strict=False):
    """Clusters after merging events up to height h (strictly below if asked)."""
    parent = list(range(dend.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for ev in dend.events:
        keep = ev.height < h if strict else ev.height <= h
        if keep:
            base = ev.leaves[0]
            for l in ev.leaves[1:]:
                parent[find(l)] = find(base)
    groups = {}
    for x in range(dend.n):
        groups.setdefault(find(x), []).append(x)
    return sorted([sorted(g) for g in groups.values()])


def similarity_partition(net, t):
    """Components of the strict-threshold relation: linked when some chain of
    pairwise weights above t (either direction) connects two nodes."""
    A = net.dense_weights()
    sym = np.maximum(A, A.T)
    n = net.n
    strong = sym > t
    np.fill_diagonal(strong, False)
    seen = np.zeros(n, dtype=bool)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp = []
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in np.nonzero(strong[v])[0]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(int(u))
        out.append(sorted(comp))
    return sorted(out)


def capacity_matrix(net):
    """Widest-bottleneck capacities between all node pairs.

    Off-diagonal entries are the best over connecting routes of the weakest
    max-symmetrized link on the route; the diagonal keeps the original loop
    weights.
    """
    A = net.dense_weights()
    W = np.maximum(A, A.T)
    n = net.n
    for k in range(n):
        np.maximum(W, np.minimum(W[:, [k]], W[[k], :]), out=W)
    np.fill_diagonal(W, np.diag(A))
    return W


def treegram(net):
    """Leaf birth heights and the merge-height matrix adjusted for loops.

    A node enters at max(A) minus its loop weight; two nodes join at the
    largest of their single-linkage merge height and both birth heights.
    """
    mx = net.max_weight()
    births = mx - np.diag(net.dense_weights())
    dend = single_linkage(net)
    M = dend.merge_heights.copy()
    M = np.maximum(M, births[:, None])
    M = np.maximum(M, births[None, :])
    np.fill_diagonal(M, births)
    return births, M


def to_newick(dend, names=None):
    """Newick string with branch lengths; infinite heights print as inf."""
    if names is None:
        names = [str(i) for i in range(dend.n)]

    height_of = {c: 0.0 for c in range(dend.n)}
    text_of = {c: names[c] for c in range(dend.n)}

    def fmt(h):
        return "inf" if math.isinf(h) else f"{h:g}"

    last = None
    for ev in dend.events:
        parts = []
        for c in ev.children:
            if math.isinf(ev.height):
                blen = "inf" if not math.isinf(height_of[c]) else "0"
            else:
                blen = fmt(ev.height - height_of[c])
            parts.append(f"{text_of[c]}:{blen}")
        text_of[ev.cluster_id] = "(" + ",".join(parts) + ")"
        height_of[ev.cluster_id] = ev.height
        last = ev.cluster_id
    if last is None:
        if dend.n == 1:
            return names[0] + ";"
        return "(" + ",".join(names) + ");"
    return text_of[last] + ";"


def save_linkage_csv(dend, path):
    """Rows `height,left,right`; infinite heights render as inf."""
    with open(path, "w") as fh:
        fh.write("height,left,right\n")
        for h, l, r in linkage_rows(dend):
            hs = "inf" if math.isinf(h) else repr(float(h))
            fh.write(f"{hs},{l},{r}\n")


def seeded_kmeans(X, k, seed=0, restarts=10, iters=100):
    """Plain k-means on the rows of X with a deterministic seeded setup.

    Initial centers are drawn k-means++ style (first uniform, later ones
    proportional to squared distance from the chosen set).  Runs `restarts`
    full fits and keeps the labelling with the best inertia.  Empty clusters
    get re-seeded on the farthest point.  Returns (labels, inertia).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2d")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= number of rows")
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = np.empty((k, X.shape[1]))
        centers[0] = X[rng.integers(n)]
        d2 = np.sum((X - centers[0]) ** 2, axis=1)
        for j in range(1, k):
            total = d2.sum()
            if total <= 0:
                centers[j] = X[rng.integers(n)]
            else:
                centers[j] = X[rng.choice(n, p=d2 / total)]
            d2 = np.minimum(d2, np.sum((X - centers[j]) ** 2, axis=1))
        labels = np.zeros(n, dtype=int)
        for _ in range(iters):
            dists = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            new_labels = np.argmin(dists, axis=1)
            for j in range(k):
                sel = new_labels == j
                if sel.any():
                    centers[j] = X[sel].mean(axis=0)
                else:
                    far = np.argmax(np.min(dists, axis=1))
                    centers[j] = X[far]
                    new_labels[far] = j
            if np.array_equal(new_labels, labels):
                labels = new_labels
                break
            labels = new_labels
        dists = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        inertia = float(np.sum(dists[np.arange(n), labels]))
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels.copy()
    return best_labels, best_inertia
