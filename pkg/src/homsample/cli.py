"""Command line front end.

Subcommands: gen, exact, sample, spectral, cluster, verify, macc-pipeline,
profile-pipeline, attribute.  Every run writes report.json under --out-dir
with a schema version, the seed, step counts, and a hash of the run
configuration (the hash ignores --out-dir so reruns elsewhere match).
Matrix artifacts land next to the report as json or csv (--format),
profiles are always csv, and the main outputs also get rendered figures.
Exit codes: 0 ok, 2 config error, 3 numerical or initialization failure.
"""

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import clustering, exact_oracle, generators, graphon_metrics, mcmc, \
    observables, plotting, spectral
from .netcore import ConfigError, InitializationError, arm_edge_motif, \
    load_frequency_matrix, load_network, path_motif, resolve_motif, \
    save_network, two_arm_motif

SCHEMA_VERSION = 1

DEFAULT_CHAIN_MOTIF = "F_0_20"


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(cfg):
    """Stable fingerprint of a run configuration."""
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    return v


def write_report(args, command, params, outputs, figures=(), notes=None):
    cfg = {"command": command, "format": args.format,
           "params": _jsonable(params), "seed": args.seed,
           "threads": args.threads}
    payload = dict(cfg)
    payload["schema_version"] = SCHEMA_VERSION
    payload["config_hash"] = config_hash(cfg)
    payload["outputs"] = _jsonable(outputs)
    payload["figures"] = sorted(figures)
    if notes:
        payload["notes"] = list(notes)
    path = os.path.join(args.out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def write_matrix(out_dir, stem, M, fmt, labels=None):
    """One matrix artifact; json carries shape and labels, csv a header row."""
    M = np.asarray(M, dtype=float)
    if fmt == "json":
        name = stem + ".json"
        payload = {"labels": list(labels) if labels else None,
                   "shape": list(M.shape), "data": _jsonable(M)}
        with open(os.path.join(out_dir, name), "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        name = stem + ".csv"
        with open(os.path.join(out_dir, name), "w") as fh:
            if labels:
                fh.write("," + ",".join(labels) + "\n")
            for i in range(M.shape[0]):
                lead = f"{labels[i]}," if labels else ""
                fh.write(lead + ",".join(repr(float(v)) for v in M[i]) + "\n")
    return name


def write_profile_csv(out_dir, stem, prof):
    name = stem + ".csv"
    with open(os.path.join(out_dir, name), "w") as fh:
        fh.write("t,value\n")
        for t, v in zip(prof.ts, prof.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")
    return name


def _unique_names(paths):
    names, seen = [], {}
    for p in paths:
        base = os.path.splitext(os.path.basename(p))[0]
        if base in seen:
            seen[base] += 1
            base = f"{base}_{seen[base]}"
        else:
            seen[base] = 0
        names.append(base)
    return names


def _load_networks(paths):
    return [load_network(p) for p in paths]


# -- observable specs -------------------------------------------------------

def parse_observe(specs, chain_motif):
    """Grammar: chd:<H> | profile:<H>[:<points>] | macc | transform[:<H>]."""
    jobs = []
    for spec in specs:
        parts = spec.split(":")
        kind = parts[0]
        job = {"spec": spec, "kind": kind, "tag": spec.replace(":", "_")}
        try:
            if kind == "chd" and len(parts) == 2:
                job["obs"] = resolve_motif(parts[1])
            elif kind == "profile" and len(parts) in (2, 3):
                job["obs"] = resolve_motif(parts[1])
                job["points"] = int(parts[2]) if len(parts) == 3 else 101
            elif kind == "macc" and len(parts) == 1:
                pass
            elif kind == "transform" and len(parts) <= 2:
                job["weight"] = resolve_motif(parts[1]) if len(parts) == 2 else None
            else:
                raise ConfigError(f"bad observable spec {spec!r}")
        except ValueError as exc:
            raise ConfigError(f"bad observable spec {spec!r}: {exc}") from None
        obs = job.get("obs") or job.get("weight")
        if obs is not None and obs.k != chain_motif.k:
            raise ConfigError(
                f"{spec!r}: observable motif needs k={chain_motif.k} nodes")
        jobs.append(job)
    if not jobs:
        raise ConfigError("need at least one --observe spec")
    return jobs


def build_estimator(job, chain_motif, net):
    if job["kind"] == "chd":
        return observables.ChdEstimator(job["obs"], net)
    if job["kind"] == "profile":
        grid = observables.default_profile_grid(job["points"])
        return observables.ProfileEstimator(job["obs"], net, grid)
    if job["kind"] == "macc":
        return observables.MaccEstimator(chain_motif, net)
    return observables.TransformEstimator(chain_motif, net, job["weight"])


def exact_observable(job, chain_motif, net, cap):
    if job["kind"] == "chd":
        return exact_oracle.conditional_density(job["obs"], net, chain_motif,
                                                cap=cap)
    if job["kind"] == "profile":
        grid = observables.default_profile_grid(job["points"])
        vals = exact_oracle.exact_profile(job["obs"], net, chain_motif, grid,
                                          cap=cap)
        return observables.ProfileResult(ts=grid, values=vals)
    if job["kind"] == "macc":
        return exact_oracle.exact_macc(chain_motif, net, cap=cap)
    motif = chain_motif if job["weight"] is None else chain_motif.add(job["weight"])
    return exact_oracle.exact_transform(motif, net, cap=cap)


def emit_observable(job, value, args, outputs, figures):
    tag = job["tag"]
    if job["kind"] == "chd":
        outputs[job["spec"]] = float(value)
    elif job["kind"] == "profile":
        outputs[job["spec"]] = write_profile_csv(args.out_dir, tag, value)
        fig = tag + ".png"
        plotting.plot_profiles(os.path.join(args.out_dir, fig),
                               {job["spec"]: value})
        figures.append(fig)
    elif job["kind"] == "macc":
        outputs[job["spec"]] = write_matrix(args.out_dir, tag, value,
                                            args.format)
        fig = tag + ".png"
        plotting.plot_macc(os.path.join(args.out_dir, fig), value)
        figures.append(fig)
    else:
        name = tag + ".tsv"
        save_network(value, os.path.join(args.out_dir, name))
        outputs[job["spec"]] = name
        fig = tag + ".png"
        plotting.plot_network_heatmap(os.path.join(args.out_dir, fig),
                                      value.dense_weights(),
                                      title="endpoint transform")
        figures.append(fig)


# -- gen --------------------------------------------------------------------

def _resolve_template(token):
    if token == "assortative":
        return generators.ASSORTATIVE_TEMPLATE
    if token == "skewed":
        return generators.SKEWED_TEMPLATE
    if os.path.exists(token):
        return load_frequency_matrix(token)
    raise ConfigError(f"unknown template {token!r}")


def _need(args, names, kind):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigError(f"gen --kind {kind} needs --{name}")


def cmd_gen(args):
    kind = args.kind
    params = {"kind": kind}
    if kind == "torus":
        _need(args, ["n"], kind)
        net = generators.torus(args.n)
        params["n"] = args.n
    elif kind == "lrtorus":
        _need(args, ["n", "p", "exponent"], kind)
        net = generators.long_range_torus(args.n, args.p, args.exponent,
                                          args.seed)
        params.update(n=args.n, p=args.p, exponent=args.exponent)
    elif kind == "sbm":
        _need(args, ["r"], kind)
        template = _resolve_template(args.template)
        net = generators.gamma_block_network(template, args.r, args.sigma,
                                             args.seed)
        params.update(template=args.template, r=args.r, sigma=args.sigma)
    elif kind == "barbell":
        _need(args, ["first", "second"], kind)
        first = load_network(args.first)
        second = load_network(args.second)
        # bridge endpoints are 1-based on the command line, like the files
        net = generators.barbell(first, second, args.u - 1, args.v - 1)
        params.update(first=os.path.basename(args.first),
                      second=os.path.basename(args.second), u=args.u, v=args.v)
    elif kind == "er":
        _need(args, ["n", "p"], kind)
        net = generators.erdos_renyi(args.n, args.p, args.seed)
        params.update(n=args.n, p=args.p)
    elif kind == "complete":
        _need(args, ["n"], kind)
        net = generators.complete_network(args.n)
        params["n"] = args.n
    else:
        raise ConfigError(f"unknown generator kind {kind!r}")
    out = args.out or os.path.join(args.out_dir, kind + ".tsv")
    save_network(net, out)
    fig = os.path.splitext(os.path.basename(out))[0] + ".png"
    plotting.plot_network_heatmap(os.path.join(args.out_dir, fig),
                                  net.dense_weights(), title=kind)
    outputs = {"network": os.path.basename(out), "n": net.n,
               "max_weight": float(net.max_weight())}
    write_report(args, "gen", params, outputs, [fig])


# -- exact and sample -------------------------------------------------------

def cmd_exact(args):
    net = load_network(args.network)
    F = resolve_motif(args.motif)
    jobs = parse_observe(args.observe, F)
    outputs = {"density": float(exact_oracle.hom_density(F, net, cap=args.cap))}
    figures = []
    for job in jobs:
        value = exact_observable(job, F, net, args.cap)
        emit_observable(job, value, args, outputs, figures)
    params = {"network": os.path.basename(args.network), "motif": args.motif,
              "observe": list(args.observe), "cap": args.cap}
    write_report(args, "exact", params, outputs, figures)


def cmd_sample(args):
    net = load_network(args.network)
    F = resolve_motif(args.motif)
    jobs = parse_observe(args.observe, F)
    ests = [build_estimator(j, F, net) for j in jobs]
    if args.replicas > 1:
        _, rate = mcmc.run_ensemble(F, net, chain=args.chain,
                                    replicas=args.replicas, steps=args.steps,
                                    burnin=args.burnin, seed=args.seed,
                                    observers=ests)
    else:
        res = mcmc.run_chain(F, net, chain=args.chain, steps=args.steps,
                             burnin=args.burnin, thin=args.thin,
                             seed=args.seed, observers=ests)
        rate = res.accept_rate
    outputs = {"steps": args.steps, "replicas": args.replicas,
               "burnin": args.burnin if args.burnin is not None
               else mcmc.default_burnin(net.n)}
    if rate is not None:
        outputs["accept_rate"] = float(rate)
    figures = []
    for job, est in zip(jobs, ests):
        emit_observable(job, est.result(), args, outputs, figures)
    params = {"network": os.path.basename(args.network), "motif": args.motif,
              "chain": args.chain, "steps": args.steps, "burnin": args.burnin,
              "thin": args.thin, "replicas": args.replicas,
              "observe": list(args.observe)}
    write_report(args, "sample", params, outputs, figures)


# -- spectral ---------------------------------------------------------------

def cmd_spectral(args):
    net = load_network(args.network)
    k = args.k
    vals, _ = spectral.weighted_spectrum(net)
    outputs = {
        "k": k,
        "density_direct": float(spectral.chain_density_direct(k, net)),
        "density_spectral": float(spectral.chain_density_spectral(k, net)),
        "top_eigenvalues": vals[:min(6, vals.size)],
        "top_multiplicity": spectral.top_multiplicity(vals),
    }
    tr = spectral.chain_transform(k, net)
    cl = spectral.transitive_closure(net)
    outputs["transform_vs_closure_maxabs"] = float(
        np.max(np.abs(tr.dense_weights() - cl.dense_weights())))
    save_network(tr, os.path.join(args.out_dir, "chain_transform.tsv"))
    save_network(cl, os.path.join(args.out_dir, "closure.tsv"))
    outputs["chain_transform"] = "chain_transform.tsv"
    outputs["closure"] = "closure.tsv"
    figures = ["chain_transform.png", "closure.png"]
    plotting.plot_network_heatmap(os.path.join(args.out_dir, figures[0]),
                                  tr.dense_weights(), title="chain transform")
    plotting.plot_network_heatmap(os.path.join(args.out_dir, figures[1]),
                                  cl.dense_weights(), title="closure")
    params = {"network": os.path.basename(args.network), "k": k}
    write_report(args, "spectral", params, outputs, figures)


# -- cluster ----------------------------------------------------------------

def cmd_cluster(args):
    net = load_network(args.network)
    params = {"network": os.path.basename(args.network),
              "transform_motif": args.transform_motif, "cap": args.cap}
    if args.transform_motif:
        motif = resolve_motif(args.transform_motif)
        net = exact_oracle.exact_transform(motif, net, cap=args.cap)
    dend = clustering.single_linkage(net)
    clustering.save_linkage_csv(dend, os.path.join(args.out_dir, "linkage.csv"))
    cap_M = clustering.capacity_matrix(net)
    outputs = {
        "linkage": "linkage.csv",
        "newick": clustering.to_newick(dend),
        "capacity": write_matrix(args.out_dir, "capacity", cap_M, args.format),
        "events": [{"height": _jsonable(ev.height), "size": len(ev.leaves)}
                   for ev in dend.events],
    }
    fig = "dendrogram.png"
    plotting.plot_dendrogram(os.path.join(args.out_dir, fig), dend)
    write_report(args, "cluster", params, outputs, [fig])


# -- verify -----------------------------------------------------------------

STABILITY_CHECKS = ("counting", "conditional", "transform", "profile")


def _stability_results(U, W):
    wedge_obs = arm_edge_motif(1, 1)
    wedge_cond = two_arm_motif(1, 1)
    return {
        "counting": graphon_metrics.check_counting_stability(path_motif(3), U, W),
        "conditional": graphon_metrics.check_conditional_stability(
            wedge_obs, wedge_cond, U, W),
        "transform": graphon_metrics.check_transform_stability(path_motif(3), U, W),
        "profile": graphon_metrics.check_profile_stability(
            wedge_obs, wedge_cond, U, W),
    }


def verify_stability(pairs, blocks, rng):
    out = {name: {"violations": 0, "min_slack": math.inf}
           for name in STABILITY_CHECKS}
    for _ in range(pairs):
        U, W = graphon_metrics.random_kernel_pair(rng, blocks)
        for name, res in _stability_results(U, W).items():
            slot = out[name]
            if not res["holds"]:
                slot["violations"] += 1
            slot["min_slack"] = min(slot["min_slack"], res["rhs"] - res["lhs"])
    return out


def verify_sandwich(pairs, blocks, rng):
    out = {"violations": 0, "min_gap_cut_indicator": math.inf,
           "min_gap_indicator_l1": math.inf}
    for _ in range(pairs):
        U, W = graphon_metrics.random_kernel_pair(rng, blocks)
        dcut = graphon_metrics.delta_cut(U, W)
        dind = graphon_metrics.delta_indicator(U, W)
        d1 = graphon_metrics.delta_p(U, W, 1)
        if dcut > dind + 1e-12 or dind > d1 + 1e-12:
            out["violations"] += 1
        out["min_gap_cut_indicator"] = min(out["min_gap_cut_indicator"],
                                           dind - dcut)
        out["min_gap_indicator_l1"] = min(out["min_gap_indicator_l1"],
                                          d1 - dind)
    return out


def closure_instability_pair(eps=2e-4):
    """Nearby inputs whose long-chain limits stay far apart."""
    from .netcore import Network
    half = np.array([0.5, 0.5])
    sharp = Network(np.diag([2.0, 2.0]), half)
    mixed = Network(np.array([[2.0 - eps, eps], [eps, 2.0 - eps]]), half)
    input_gap = float(np.abs(sharp.dense_weights()
                             - mixed.dense_weights()).sum())
    cl_a = spectral.transitive_closure(sharp).dense_weights()
    cl_b = spectral.transitive_closure(mixed).dense_weights()
    return {"eps": eps, "input_l1": input_gap,
            "closure_l1": float(np.abs(cl_a - cl_b).sum())}


def cmd_verify(args):
    rng = np.random.default_rng(args.seed)
    outputs = {}
    if "stability" in args.checks:
        outputs["stability"] = verify_stability(args.pairs, args.blocks, rng)
    if "sandwich" in args.checks:
        outputs["sandwich"] = verify_sandwich(args.pairs, args.blocks, rng)
    if "closure" in args.checks:
        outputs["closure_instability"] = closure_instability_pair()
    params = {"checks": list(args.checks), "pairs": args.pairs,
              "blocks": args.blocks}
    write_report(args, "verify", params, outputs)


# -- macc pipeline ----------------------------------------------------------

def macc_pipeline(nets, names, chain_motif, chain="glauber", steps=None,
                  burnin=None, seed=0, k=2, kmeans_seeds=10):
    """MACC per network, Frobenius distances, linkage, seeded k-means."""
    if len(nets) < 2:
        raise ConfigError("macc pipeline needs at least two networks")
    for name, net in zip(names, nets):
        if net.max_weight() > 1.0 + 1e-12:
            raise ConfigError(f"{name}: macc needs edge weights in [0, 1]")
    maccs, per_net = [], []
    for i, net in enumerate(nets):
        n_steps = steps if steps is not None else \
            math.ceil(2 * net.n * math.log(max(net.n, 2)))
        est = observables.MaccEstimator(chain_motif, net)
        rng = np.random.default_rng([seed, i])
        res = mcmc.run_chain(chain_motif, net, chain=chain, steps=n_steps,
                             burnin=burnin, rng=rng, observers=[est])
        M = est.result()
        maccs.append(M)
        rec = {"name": names[i], "steps": n_steps}
        if res.accept_rate is not None:
            rec["accept_rate"] = float(res.accept_rate)
        per_net.append(rec)
    m = len(nets)
    D = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            D[a, b] = D[b, a] = float(np.linalg.norm(maccs[a] - maccs[b]))
    dend = clustering.linkage_from_dissimilarity(D)
    X = np.stack([M.ravel() for M in maccs])
    km = {}
    for s in range(kmeans_seeds):
        labels, inertia = clustering.seeded_kmeans(X, k, seed=[seed, 10_000 + s])
        km[str(s)] = {"labels": labels.tolist(), "inertia": inertia}
    return {"maccs": maccs, "frobenius": D, "dendrogram": dend,
            "kmeans": km, "per_net": per_net}


def cmd_macc_pipeline(args):
    nets = _load_networks(args.networks)
    names = _unique_names(args.networks)
    chain_motif = resolve_motif(args.chain_motif)
    res = macc_pipeline(nets, names, chain_motif, chain=args.chain,
                        steps=args.steps, burnin=args.burnin, seed=args.seed,
                        k=args.k, kmeans_seeds=args.kmeans_seeds)
    outputs = {"per_net": res["per_net"], "kmeans": res["kmeans"],
               "newick": clustering.to_newick(res["dendrogram"], names)}
    figures = []
    for name, M in zip(names, res["maccs"]):
        outputs[name + "_macc"] = write_matrix(args.out_dir, name + "_macc",
                                               M, args.format)
        fig = name + "_macc.png"
        # figures use the square-root display scale; data files stay raw
        plotting.plot_macc(os.path.join(args.out_dir, fig), M, title=name)
        figures.append(fig)
    outputs["frobenius"] = write_matrix(args.out_dir, "frobenius",
                                        res["frobenius"], args.format,
                                        labels=names)
    clustering.save_linkage_csv(res["dendrogram"],
                                os.path.join(args.out_dir, "linkage.csv"))
    outputs["linkage"] = "linkage.csv"
    fig = "dendrogram.png"
    plotting.plot_dendrogram(os.path.join(args.out_dir, fig),
                             res["dendrogram"], names)
    figures.append(fig)
    params = {"networks": [os.path.basename(p) for p in args.networks],
              "chain_motif": args.chain_motif, "chain": args.chain,
              "steps": args.steps, "burnin": args.burnin, "k": args.k,
              "kmeans_seeds": args.kmeans_seeds}
    write_report(args, "macc-pipeline", params, outputs, figures)


# -- profile pipeline -------------------------------------------------------

def _parse_pair(spec):
    parts = spec.split(":")
    if len(parts) != 2:
        raise ConfigError(f"bad pair spec {spec!r}; want OBS:CHAIN")
    obs, chain = resolve_motif(parts[0]), resolve_motif(parts[1])
    if obs.k != chain.k:
        raise ConfigError(f"pair {spec!r} needs matching node counts")
    return obs, chain


def profile_pipeline(nets, names, pairs, points=101, cap=10 ** 6,
                     chain="glauber", steps=20_000, replicas=100, burnin=None,
                     seed=0):
    """Threshold profiles per network per pair, exactly when enumerable.

    Falls back to a replica chain ensemble when n^k exceeds cap; the route
    taken is recorded per network.
    """
    grid = observables.default_profile_grid(points)
    out = []
    for p_idx, (obs, chain_motif) in enumerate(pairs):
        profiles, routes = [], []
        for i, net in enumerate(nets):
            if float(net.n) ** chain_motif.k <= cap:
                vals = exact_oracle.exact_profile(obs, net, chain_motif, grid,
                                                  cap=cap)
                prof = observables.ProfileResult(ts=grid.copy(), values=vals)
                routes.append("exact")
            else:
                est = observables.ProfileEstimator(obs, net, grid)
                mcmc.run_ensemble(chain_motif, net, chain=chain,
                                  replicas=replicas, steps=steps,
                                  burnin=burnin,
                                  rng=np.random.default_rng([seed, p_idx, i]),
                                  observers=[est])
                prof = est.result()
                routes.append("mcmc")
            profiles.append(prof)
        m = len(nets)
        D = np.zeros((m, m))
        for a in range(m):
            for b in range(a + 1, m):
                D[a, b] = D[b, a] = observables.profile_l1_distance(
                    profiles[a], profiles[b])
        out.append({"profiles": profiles, "l1": D, "routes": routes})
    return out


def cmd_profile_pipeline(args):
    nets = _load_networks(args.networks)
    names = _unique_names(args.networks)
    pairs = [_parse_pair(s) for s in args.pairs]
    res = profile_pipeline(nets, names, pairs, points=args.points,
                           cap=args.cap, chain=args.chain, steps=args.steps,
                           replicas=args.replicas, burnin=args.burnin,
                           seed=args.seed)
    outputs, figures = {}, []
    for spec, one in zip(args.pairs, res):
        tag = spec.replace(":", "_")
        entry = {"routes": dict(zip(names, one["routes"]))}
        for name, prof in zip(names, one["profiles"]):
            entry[name] = write_profile_csv(args.out_dir, f"{name}_{tag}", prof)
        entry["l1"] = write_matrix(args.out_dir, f"l1_{tag}", one["l1"],
                                   args.format, labels=names)
        fig = f"profiles_{tag}.png"
        plotting.plot_profiles(os.path.join(args.out_dir, fig),
                               dict(zip(names, one["profiles"])),
                               title=f"profiles {spec}")
        figures.append(fig)
        outputs[spec] = entry
    params = {"networks": [os.path.basename(p) for p in args.networks],
              "pairs": list(args.pairs), "points": args.points,
              "cap": args.cap, "chain": args.chain, "steps": args.steps,
              "replicas": args.replicas, "burnin": args.burnin}
    write_report(args, "profile-pipeline", params, outputs, figures)


# -- attribution ------------------------------------------------------------

def _diag_profile(net, grid):
    """Exact threshold profile of the self-loop observable at a bare node."""
    vals = exact_oracle.exact_profile(arm_edge_motif(0, 0), net,
                                      two_arm_motif(0, 0), grid)
    return observables.ProfileResult(ts=grid.copy(), values=vals)


def row_markov_kl(P, Q, tiny=1e-12):
    """Mean over rows of KL(p_row || q_row), natural log.

    Rows that are zero on both sides are skipped; a row that is zero on one
    side only is replaced by the uniform row there.  Positive p against a
    zero q cell is clipped at tiny rather than returning infinity.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise ValueError("matrices must share a shape")
    n = P.shape[1]
    total, rows = 0.0, 0
    for p, q in zip(P, Q):
        ps, qs = p.sum(), q.sum()
        if ps <= 0 and qs <= 0:
            continue
        p = p / ps if ps > 0 else np.full(n, 1.0 / n)
        q = q / qs if qs > 0 else np.full(n, 1.0 / n)
        mask = p > 0
        total += float(np.sum(p[mask] * np.log(p[mask]
                                               / np.clip(q[mask], tiny, None))))
        rows += 1
    if rows == 0:
        return 0.0
    return total / rows


ATTRIBUTION_METHODS = ("chd00", "kl", "frobenius")


def attribution_distances(nets, method, points=101):
    """Pairwise distance matrix between row-markov networks."""
    m = len(nets)
    D = np.zeros((m, m))
    if method == "chd00":
        grid = observables.default_profile_grid(points)
        profs = [_diag_profile(net, grid) for net in nets]
        for a in range(m):
            for b in range(a + 1, m):
                D[a, b] = D[b, a] = observables.profile_l1_distance(
                    profs[a], profs[b])
        return D
    mats = [net.dense_weights() for net in nets]
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            if method == "kl":
                D[a, b] = row_markov_kl(mats[a], mats[b])
            elif method == "frobenius":
                D[a, b] = float(np.linalg.norm(mats[a] - mats[b]))
            else:
                raise ConfigError(f"unknown attribution method {method!r}")
    return D


def attribution_splits(D, labels, known_per_author, splits, rng):
    """Nearest-known-text attribution over random reference splits.

    Each split draws up to known_per_author reference texts per author
    (always leaving at least one out) and attributes every remaining text
    to the author of the closest reference text, first index winning ties.
    """
    labels = list(labels)
    authors = sorted(set(labels))
    by_author = {a: [i for i, l in enumerate(labels) if l == a]
                 for a in authors}
    for a, idx in by_author.items():
        if len(idx) < 2:
            raise ConfigError(f"author {a!r} needs at least two texts")
    correct = {a: 0 for a in authors}
    counted = {a: 0 for a in authors}
    for _ in range(splits):
        known = []
        for a in authors:
            idx = by_author[a]
            take = min(known_per_author, len(idx) - 1)
            known.extend(rng.choice(idx, size=take, replace=False))
        known = sorted(int(i) for i in known)
        rest = [i for i in range(len(labels)) if i not in set(known)]
        for i in rest:
            j = known[int(np.argmin(D[i, known]))]
            counted[labels[i]] += 1
            if labels[j] == labels[i]:
                correct[labels[i]] += 1
    per_class = {a: (correct[a] / counted[a]) if counted[a] else 0.0
                 for a in authors}
    total = sum(counted.values())
    overall = sum(correct.values()) / total if total else 0.0
    return {"overall": overall, "per_class": per_class, "splits": splits}


def attribution_run(nets, labels, methods=ATTRIBUTION_METHODS,
                    known_per_author=4, splits=1000, seed=0, points=101):
    out = {}
    for method in methods:
        D = attribution_distances(nets, method, points=points)
        rng = np.random.default_rng([seed, ATTRIBUTION_METHODS.index(method)])
        out[method] = attribution_splits(D, labels, known_per_author, splits,
                                         rng)
    return out


def cmd_attribute(args):
    if len(args.matrices) != len(args.labels):
        raise ConfigError("--matrices and --labels must pair up")
    nets = [generators.word_adjacency_network(p, "row_markov")
            for p in args.matrices]
    names = _unique_names(args.matrices)
    methods = ATTRIBUTION_METHODS if args.method == "all" else (args.method,)
    outputs = {}
    if args.validation:
        vnets = [generators.word_adjacency_network(p, "row_markov")
                 for p in args.validation]
        vnames = _unique_names(args.validation)
        for method in methods:
            D = attribution_distances(nets + vnets, method, points=args.points)
            assigned = {}
            base = len(nets)
            for vi, vname in enumerate(vnames):
                j = int(np.argmin(D[base + vi, :base]))
                assigned[vname] = args.labels[j]
            outputs[method] = {"assigned": assigned}
    else:
        res = attribution_run(nets, args.labels, methods,
                              known_per_author=args.known_per_author,
                              splits=args.splits, seed=args.seed,
                              points=args.points)
        outputs.update(res)
    notes = []
    if not args.validation and args.splits < 10_000:
        notes.append(f"averaging {args.splits} random splits; "
                     "the reference protocol uses 10000")
    params = {"matrices": [os.path.basename(p) for p in args.matrices],
              "labels": list(args.labels),
              "validation": [os.path.basename(p) for p in args.validation],
              "method": args.method, "splits": args.splits,
              "known_per_author": args.known_per_author,
              "points": args.points}
    write_report(args, "attribute", params, outputs, notes=notes)
    for method in methods:
        line = outputs[method]
        if "overall" in line:
            print(f"{method}: overall accuracy {line['overall']:.4f}")


# -- parser -----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="homsample",
        description="motif homomorphism sampling, oracles, and pipelines")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1,
                        help="recorded in reports; execution is serial")
    parser.add_argument("--out-dir", default=".")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic network")
    p.add_argument("--kind", required=True,
                   choices=["torus", "lrtorus", "sbm", "barbell", "er",
                            "complete"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--exponent", type=float)
    p.add_argument("--template", default="assortative",
                   help="assortative, skewed, or a frequency matrix file")
    p.add_argument("--r", type=int)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--first", help="left network file for barbell")
    p.add_argument("--second", help="right network file for barbell")
    p.add_argument("--u", type=int, default=1,
                   help="1-based bridge node in the first network")
    p.add_argument("--v", type=int, default=1,
                   help="1-based bridge node in the second network")
    p.add_argument("--out", help="network file path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("exact", help="brute-force observables")
    p.add_argument("--network", required=True)
    p.add_argument("--motif", required=True)
    p.add_argument("--observe", nargs="+", required=True)
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("sample", help="chain estimates of observables")
    p.add_argument("--network", required=True)
    p.add_argument("--motif", required=True)
    p.add_argument("--chain", choices=["glauber", "pivot"], default="glauber")
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--observe", nargs="+", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectral", help="chain densities, transform, closure")
    p.add_argument("--network", required=True)
    p.add_argument("--k", type=int, default=50)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("cluster", help="linkage, newick, capacities")
    p.add_argument("--network", required=True)
    p.add_argument("--transform-motif",
                   help="apply this endpoint transform first, e.g. C_3")
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("verify", help="desk checks on random step kernels")
    p.add_argument("--checks", nargs="+", default=["stability", "sandwich",
                                                   "closure"],
                   choices=["stability", "sandwich", "closure"])
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--blocks", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("macc-pipeline",
                       help="MACCs, Frobenius distances, linkage, k-means")
    p.add_argument("--networks", nargs="+", required=True)
    p.add_argument("--chain-motif", default=DEFAULT_CHAIN_MOTIF)
    p.add_argument("--chain", choices=["glauber", "pivot"], default="glauber")
    p.add_argument("--steps", type=int, default=None,
                   help="default 2 n log n per network")
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--kmeans-seeds", type=int, default=10)
    p.set_defaults(func=cmd_macc_pipeline)

    p = sub.add_parser("profile-pipeline",
                       help="threshold profiles and L1 distance matrices")
    p.add_argument("--networks", nargs="+", required=True)
    p.add_argument("--pairs", nargs="+", default=["H_0_0:F_0_0"],
                   help="OBS:CHAIN motif pairs")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.add_argument("--chain", choices=["glauber", "pivot"], default="glauber")
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--burnin", type=int, default=None)
    p.set_defaults(func=cmd_profile_pipeline)

    p = sub.add_parser("attribute",
                       help="nearest-reference attribution of matrices")
    p.add_argument("--matrices", nargs="+", required=True)
    p.add_argument("--labels", nargs="+", required=True)
    p.add_argument("--validation", nargs="*", default=[])
    p.add_argument("--method", choices=list(ATTRIBUTION_METHODS) + ["all"],
                   default="all")
    p.add_argument("--splits", type=int, default=1000)
    p.add_argument("--known-per-author", type=int, default=4)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_attribute)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InitializationError, RuntimeError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
