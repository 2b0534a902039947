"""Clustering and ranking comparison, planted-partition graphs and benchmark runs."""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .graph import DirectedWeightedGraph, from_edges


@dataclass(frozen=True)
class FScoreReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return asdict(self)


def _as_assignment(x, labels: Sequence[str] | None = None) -> dict[str, int]:
    """Accept a mapping label->cluster, a ClusterSet (with labels) or a list of label lists."""
    if isinstance(x, Mapping):
        return {str(k): int(v) for k, v in x.items()}
    clusters = getattr(x, "clusters", x)
    out: dict[str, int] = {}
    for cid, members in enumerate(clusters):
        for v in members:
            key = labels[v] if labels is not None and not isinstance(v, str) else str(v)
            if key in out:
                raise ValueError(f"node {key!r} appears in more than one cluster")
            out[key] = cid
    return out


def _pair_counts(a: np.ndarray, b: np.ndarray) -> tuple[int, int, int, int]:
    # contingency-table pair counting, O(n + #clusters^2)
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)

    def pairs(x):
        return int((x * (x - 1) // 2).sum())

    n = a.size
    both = pairs(table)
    in_a = pairs(table.sum(axis=1))
    in_b = pairs(table.sum(axis=0))
    total = n * (n - 1) // 2
    return both, in_a - both, in_b - both, total - in_a - in_b + both


def pairwise_f_score(predicted, truth, labels: Sequence[str] | None = None) -> FScoreReport:
    """Pairwise co-membership F1 of ``predicted`` against ``truth``.

    Nodes present in only one side are dropped with a warning. Precision or
    recall with an empty denominator counts as 0.
    """
    pa = _as_assignment(predicted, labels)
    pb = _as_assignment(truth, labels)
    common = sorted(set(pa) & set(pb))
    if not common:
        raise ValueError("the two clusterings share no nodes")
    dropped = len(pa) + len(pb) - 2 * len(common)
    if dropped:
        warnings.warn(f"{dropped} node(s) appear in only one clustering and were dropped", stacklevel=2)
    a = np.array([pa[k] for k in common])
    b = np.array([pb[k] for k in common])
    tp, fp, fn, tn = _pair_counts(a, b)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return FScoreReport(tp, fp, fn, tn, precision, recall, f1)


def kendall_tau_distance(a, b, restrict: Sequence[int] | None = None) -> float:
    """Fraction of discordant pairs among pairs untied in both vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("rankings must be 1-D vectors of equal length")
    if restrict is not None:
        idx = np.asarray(sorted(set(int(i) for i in restrict)), dtype=np.int64)
        a, b = a[idx], b[idx]
    i, j = np.triu_indices(a.size, k=1)
    da = np.sign(a[i] - a[j])
    db = np.sign(b[i] - b[j])
    ok = (da != 0) & (db != 0)
    m = int(ok.sum())
    if m < 2:
        raise ValueError(f"only {m} comparable pair(s); need at least 2")
    return float((da[ok] != db[ok]).sum() / m)


# --------------------------------------------------------------------------- planted partition

@dataclass(frozen=True)
class SyntheticSpec:
    """Planted partition: ``k`` near-equal communities, mean degree ``degree``, mixing ``mu``."""

    n: int = 1000
    k: int = 20
    degree: float = 16.0
    mu: float = 0.1
    seed: int = 0
    sizes: tuple[int, ...] | None = None

    def community_sizes(self) -> list[int]:
        if self.sizes is not None:
            return list(self.sizes)
        base, extra = divmod(self.n, self.k)
        return [base + (1 if i < extra else 0) for i in range(self.k)]

    def validate(self) -> None:
        sizes = self.community_sizes()
        if sum(sizes) != self.n:
            raise ValueError("community sizes must add up to n")
        if min(sizes) < 2:
            raise ValueError("every community needs at least two nodes")
        if not 0 <= self.mu < 1:
            raise ValueError("mu must lie in [0, 1)")
        if self.degree <= 0:
            raise ValueError("degree must be positive")
        intra = (1 - self.mu) * self.degree
        if intra > min(sizes) - 1:
            raise ValueError(f"intra-community degree {intra:g} exceeds the smallest community ({min(sizes)} nodes)")
        if len(sizes) == 1 and self.mu > 0:
            raise ValueError("mixing needs at least two communities")


def generate_planted_partition(spec: SyntheticSpec) -> tuple[DirectedWeightedGraph, dict[str, int]]:
    """Undirected planted-partition graph and its community labels.

    Draws ``m = round(n * degree / 2)`` distinct edges, exactly
    ``round(mu * m)`` of them between communities. An intra edge joins a
    uniformly random node to another member of its community; an inter edge
    joins it to a uniformly random node elsewhere. Duplicates are redrawn
    within their own kind so rejection does not shift the mixing level.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    sizes = np.asarray(spec.community_sizes())
    comm = np.repeat(np.arange(sizes.size), sizes)
    starts = np.concatenate([[0], np.cumsum(sizes)])
    n = spec.n
    m = int(round(n * spec.degree / 2))
    m_inter = int(round(spec.mu * m))
    m_intra = m - m_inter
    if m_intra > int((sizes * (sizes - 1) // 2).sum()):
        raise ValueError("too many intra-community edges for the community sizes")

    def draw(count: int, inter: bool) -> set[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        while len(out) < count:
            u = rng.integers(n, size=max(64, count - len(out)))
            cu = comm[u]
            size_u = sizes[cu]
            if inter:
                r = rng.integers(0, n - size_u)
                v = r + np.where(r >= starts[cu], size_u, 0)
            else:
                v = starts[cu] + rng.integers(0, size_u - 1)
                v = v + (v >= u)
            for a, b in zip(u.tolist(), v.tolist()):
                out.add((a, b) if a < b else (b, a))
                if len(out) == count:
                    break
        return out

    edges = sorted(draw(m_intra, False)) + sorted(draw(m_inter, True))
    labels = [str(i) for i in range(n)]
    g = from_edges(((labels[a], labels[b], 1.0) for a, b in edges), directed=False, nodes=labels)
    truth = {labels[i]: int(comm[i]) for i in range(n)}
    return g, truth


def intra_edge_fraction(g: DirectedWeightedGraph, truth: Mapping[str, int]) -> float:
    comm = np.array([truth[lab] for lab in g.labels])
    A = g.adjacency.tocoo()
    off = A.row != A.col
    return float((comm[A.row[off]] == comm[A.col[off]]).mean())


# --------------------------------------------------------------------------- benchmark

def benchmark_run(graph: DirectedWeightedGraph, truth: Mapping[str, int], config=None, dataset: str = "", model_kwargs: dict | None = None, recluster: int = 0) -> dict:
    """Run centrality plus clustering end to end and report F1, cluster count and wall time."""
    from .centrality import model_for
    from .clustering import ClusteringConfig, cluster_graph, subgraph_recluster

    config = config or ClusteringConfig()
    t0 = time.perf_counter()
    model = model_for(graph, **(model_kwargs or {}))
    result = cluster_graph(model, config)
    clusters = result.clusters
    if recluster:
        clusters = subgraph_recluster(model, clusters, recluster, config)
    wall = time.perf_counter() - t0
    rep = pairwise_f_score(clusters, truth, graph.labels)
    return {
        "dataset": dataset,
        "config": {**model.config(), **asdict(config), "recluster": recluster},
        "f_score": rep.f1,
        "precision": rep.precision,
        "recall": rep.recall,
        "n_clusters": len(clusters),
        "wall_ms": wall * 1000.0,
        "seed": config.rng_seed,
    }


SWEEP_MIXING = tuple(round(0.05 * i, 2) for i in range(1, 11))


def synthetic_sweep(n: int = 1000, k: int = 20, degree: float = 16.0, seeds: int = 5, config=None, mixing=SWEEP_MIXING, model_kwargs: dict | None = None) -> list[dict]:
    """One benchmark row per (mixing, seed) on planted-partition graphs."""
    rows = []
    for mu in mixing:
        for seed in range(seeds):
            g, truth = generate_planted_partition(SyntheticSpec(n=n, k=k, degree=degree, mu=mu, seed=seed))
            rep = benchmark_run(g, truth, config, f"planted-{mu}-{seed}", model_kwargs)
            rows.append({"mu": mu, "seed": seed, "f_score": rep["f_score"], "n_clusters": rep["n_clusters"], "wall_ms": rep["wall_ms"]})
    return rows


def summarise_sweep(rows: list[dict]) -> dict:
    mu = np.array([r["mu"] for r in rows])
    f = np.array([r["f_score"] for r in rows])
    means = {float(m): float(f[mu == m].mean()) for m in np.unique(mu)}
    low = [v for m, v in means.items() if m < 0.3]
    return {
        "mean_f_by_mu": means,
        "min_mean_f_below_0.3": min(low) if low else float("nan"),
        "pearson_r": float(np.corrcoef(mu, f)[0, 1]) if np.ptp(f) > 0 else float("nan"),
    }


def write_report(report: dict, path) -> None:
    from pathlib import Path

    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
