"""Command-line front end: ``entropic <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import datasets
from .centrality import (
    centrality_series,
    centralization,
    centralization_sequence,
    histogram_data,
    model_for,
    scatter_data,
    write_histogram_csv,
    write_json,
    write_profile_csv,
    write_scatter_csv,
    write_series_csv,
)
from .clustering import ClusteringConfig, Level, cluster_graph, subgraph_recluster, write_clusters
from .evaluation import SyntheticSpec, benchmark_run, generate_planted_partition, pairwise_f_score, write_report
from .graph import GraphParseError, read_edge_list, read_ground_truth, write_edge_list, write_ground_truth
from .markov import NumericalError, parse_absorption

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def parse_horizon(spec: str) -> int | None:
    s = spec.strip().lower()
    if s in ("inf", "infinity", "asymptotic"):
        return None
    if s.startswith("t:"):
        s = s[2:]
    try:
        t = int(s)
    except ValueError:
        raise ValueError(f"horizon must be 'inf' or 't:<int>', got {spec!r}") from None
    if t < 1:
        raise ValueError("horizon must be at least 1")
    return t


def load_input(path: str, directed: bool | None):
    """An edge-list file, or the name of a known dataset."""
    p = Path(path)
    if not p.exists() and path in datasets.BUNDLED + datasets.FILE_BACKED:
        g, _ = datasets.load(path)
        return g
    return read_edge_list(p, directed=directed)


def load_truth(path: str | None, input_name: str):
    if path:
        return read_ground_truth(path)
    if input_name in datasets.BUNDLED + datasets.FILE_BACKED:
        return datasets.load(input_name)[1]
    raise ValueError("a ground-truth file is required (--ground-truth)")


def _model(args):
    g = load_input(args.input, args.directed)
    parse_absorption(args.absorption)
    return model_for(g, args.alpha, args.mu, args.absorption)


def _clustering_config(args) -> ClusteringConfig:
    return ClusteringConfig(
        she_fraction=args.she,
        linkage=args.linkage,
        iterations=args.iterations,
        rng_seed=args.seed,
        row_method=args.row_method,
        horizon=parse_horizon(args.horizon),
    )


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------------------- commands

def cmd_centrality(args) -> int:
    model = _model(args)
    horizon = parse_horizon(args.horizon)
    prof = model.centrality(horizon)
    out = _out(args)
    write_profile_csv(prof, out / "centrality.csv")
    write_scatter_csv(scatter_data(model.distribution(horizon), prof), out / "scatter.csv")
    write_histogram_csv(histogram_data(prof), out / "histogram.csv")
    seq = centralization_sequence(prof, model.absorption)
    write_json(
        {
            "config": {**model.config(), "horizon": "inf" if horizon is None else horizon},
            "centralization": centralization(prof, model.absorption),
            "sequence": [{"node": k, "value": v} for k, v in zip(seq.labels, seq.values.tolist())],
            "summary": seq.summary(),
        },
        out / "centralization.json",
    )
    return EXIT_OK


def cmd_series(args) -> int:
    model = _model(args)
    g = model.graph
    nodes = None
    if args.nodes:
        nodes = [g.index(lab) for lab in args.nodes.split(",")]
    series = centrality_series(model, args.t_max, nodes)
    write_series_csv(series, _out(args) / "series.csv")
    return EXIT_OK


def cmd_cluster(args) -> int:
    model = _model(args)
    cfg = _clustering_config(args)
    result = cluster_graph(model, cfg)
    if args.recluster:
        refined = subgraph_recluster(model, result.clusters, args.recluster, cfg)
        result.trace.levels.append(Level(refined, []))
    write_clusters(result, _out(args), model.graph)
    return EXIT_OK


def cmd_eval(args) -> int:
    doc = json.loads(Path(args.clusters).read_text(encoding="utf-8"))
    truth = read_ground_truth(args.ground_truth)
    rep = pairwise_f_score(doc["clusters"], truth)
    report = {"clusters": args.clusters, "ground_truth": args.ground_truth, **rep.as_dict(), "f_score": rep.f1, "n_clusters": len(doc["clusters"])}
    write_report(report, _out(args) / "report.json")
    print(f"F1 = {rep.f1:.4f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _clustering_config(args)
    model_kwargs = {"alpha": args.alpha, "mu": args.mu, "absorption": args.absorption}
    if args.input:
        g = load_input(args.input, args.directed)
        truth = load_truth(args.ground_truth, args.input)
        name = args.input
    else:
        spec = SyntheticSpec(n=args.n, k=args.k, degree=args.degree, mu=args.mixing, seed=args.seed)
        g, truth = generate_planted_partition(spec)
        name = f"planted(n={spec.n},k={spec.k},degree={spec.degree:g},mu={spec.mu:g})"
    report = benchmark_run(g, truth, cfg, name, model_kwargs, args.recluster)
    write_report(report, _out(args) / "report.json")
    print(f"{name}: F1 = {report['f_score']:.4f}, {report['n_clusters']} clusters, {report['wall_ms']:.1f} ms")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SyntheticSpec(n=args.n, k=args.k, degree=args.degree, mu=args.mixing, seed=args.seed)
    g, truth = generate_planted_partition(spec)
    out = _out(args)
    write_edge_list(g, out / "graph.txt")
    write_ground_truth(truth, out / "labels.txt")
    return EXIT_OK


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entropic", description="Markov entropic centrality and clustering")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_opts(sp, input_required=True):
        if input_required:
            sp.add_argument("input", help="edge-list file or dataset name (karate, dolphins, football)")
        else:
            sp.add_argument("input", nargs="?", help="edge-list file or dataset name; omit to use a planted partition")
        d = sp.add_mutually_exclusive_group()
        d.add_argument("--directed", dest="directed", action="store_true", default=None)
        d.add_argument("--undirected", dest="directed", action="store_false")
        sp.add_argument("--alpha", default="unit", help="unit | weight | pow:<beta>")
        sp.add_argument("--mu", default="unit", help="unit | ratio[:<gamma>]")
        sp.add_argument("--absorption", default="degree", help="degree | wdegree | const:<a>")
        sp.add_argument("--horizon", default="inf", help="inf | t:<int>")
        sp.add_argument("--out", default=".", help="output directory")

    def cluster_opts(sp):
        sp.add_argument("--she", type=float, default=0.3, help="fraction of nodes treated as hubs")
        sp.add_argument("--iterations", type=int, default=2)
        sp.add_argument("--linkage", choices=("min", "mean", "max"), default="min")
        sp.add_argument("--row-method", choices=("gap", "ward"), default="gap")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--recluster", type=int, default=0, help="re-run inside the K largest clusters")

    def synth_opts(sp):
        sp.add_argument("--n", type=int, default=1000)
        sp.add_argument("--k", type=int, default=20)
        sp.add_argument("--degree", type=float, default=16.0)
        sp.add_argument("--mixing", type=float, default=0.1)

    s = sub.add_parser("centrality", help="per-node centrality, scatter/histogram data and centralization")
    graph_opts(s)
    s.set_defaults(func=cmd_centrality)

    s = sub.add_parser("series", help="centrality for t = 1..t_max and the asymptotic value")
    graph_opts(s)
    s.add_argument("--nodes", help="comma-separated node labels (default: all)")
    s.add_argument("--t-max", type=int, default=6)
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("cluster", help="two-stage clustering")
    graph_opts(s)
    cluster_opts(s)
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("eval", help="pairwise F1 of a clusters.json against ground truth")
    s.add_argument("clusters")
    s.add_argument("ground_truth")
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("bench", help="timed end-to-end clustering against ground truth")
    graph_opts(s, input_required=False)
    cluster_opts(s)
    synth_opts(s)
    s.add_argument("--ground-truth")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("synth", help="write a planted-partition graph and its labels")
    synth_opts(s)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphParseError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
