"""Figure rendering for reports; every function writes a PNG and returns
its path.  Uses the Agg backend so the CLI works headless."""

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_profiles(path, profiles, title="threshold profiles"):
    """profiles: mapping from label to ProfileResult."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, prof in profiles.items():
        ax.plot(prof.ts, prof.values, label=label, drawstyle="steps-post")
    ax.set_xlabel("threshold t")
    ax.set_ylabel("fraction of maps above t")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    if len(profiles) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_macc(path, M, title="average connection matrix", sqrt_scale=True):
    """Heatmap of a k x k connection matrix; sqrt scaling is display-only."""
    shown = np.sqrt(np.maximum(M, 0.0)) if sqrt_scale else M
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(shown, cmap="viridis", vmin=0.0, vmax=1.0)
    label = "sqrt(value)" if sqrt_scale else "value"
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("node j")
    ax.set_ylabel("node i")
    ax.set_title(title)
    return _finish(fig, path)


def plot_network_heatmap(path, weights, title="edge weights", log_scale=False):
    W = np.asarray(weights, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    shown = np.log10(W + W[W > 0].min() * 1e-3) if log_scale and W.max() > 0 else W
    im = ax.imshow(shown, cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    return _finish(fig, path)


def plot_tv_curves(path, curves, title="distance to stationarity"):
    """curves: mapping from label to an empirical_mixing output dict."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, out in curves.items():
        ax.plot(out["steps"], out["tv_raw"], label=f"{label} raw", alpha=0.6)
        ax.plot(out["steps"], out["tv_debiased"], label=f"{label} debiased",
                linestyle="--")
        if "root_tv_raw" in out:
            ax.plot(out["steps"], out["root_tv_raw"],
                    label=f"{label} root raw", alpha=0.6, linestyle=":")
    ax.set_xlabel("step")
    ax.set_ylabel("total variation")
    ax.set_ylim(bottom=0)
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def _leaf_positions(dend):
    children_of = {ev.cluster_id: ev.children for ev in dend.events}
    seen_as_child = {c for ev in dend.events for c in ev.children}
    roots = [i for i in range(dend.n) if i not in seen_as_child]
    roots += [ev.cluster_id for ev in dend.events
              if ev.cluster_id not in seen_as_child]
    order = []

    def walk(c):
        if c < dend.n:
            order.append(c)
        else:
            for kid in children_of[c]:
                walk(kid)

    for r in roots:
        walk(r)
    return {leaf: i for i, leaf in enumerate(order)}


def plot_dendrogram(path, dend, names=None, title="single-linkage merges"):
    """Draws the merge tree; infinite heights render just above the rest."""
    pos = _leaf_positions(dend)
    finite = [ev.height for ev in dend.events if math.isfinite(ev.height)]
    top = max(finite) if finite else 1.0
    display_inf = top * 1.15 + 0.05
    xs = dict(pos)
    hs = {leaf: 0.0 for leaf in range(dend.n)}
    fig, ax = plt.subplots(figsize=(max(4, dend.n * 0.35), 4))
    for ev in dend.events:
        h = ev.height if math.isfinite(ev.height) else display_inf
        kid_x = [xs[c] for c in ev.children]
        for c in ev.children:
            ax.plot([xs[c], xs[c]], [hs[c], h], color="tab:blue", lw=1.2)
        ax.plot([min(kid_x), max(kid_x)], [h, h], color="tab:blue", lw=1.2)
        xs[ev.cluster_id] = float(np.mean(kid_x))
        hs[ev.cluster_id] = h
    if names is None:
        names = [str(i) for i in range(dend.n)]
    order = sorted(range(dend.n), key=lambda leaf: pos[leaf])
    ax.set_xticks([pos[leaf] for leaf in order])
    ax.set_xticklabels([names[leaf] for leaf in order], rotation=90, fontsize=7)
    ax.set_ylabel("merge height")
    if any(not math.isfinite(ev.height) for ev in dend.events):
        ax.axhline(display_inf, color="gray", lw=0.5, linestyle=":")
        ax.text(0.0, display_inf, " never merges", fontsize=7, va="bottom",
                color="gray")
    ax.set_title(title)
    return _finish(fig, path)
