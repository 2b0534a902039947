"""Entropy-guided two-stage clustering.

Stage 1 grows a local cluster around each low-centrality query node from its
row of absorption probabilities, prunes it against hub nodes and the current
clusters, and merges it into the global view. Stage 2 repeats the same loop
with the stage-1 clusters as supernodes.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.cluster.hierarchy import fcluster, linkage as hlinkage
from scipy.sparse.csgraph import connected_components

from .centrality import EntropicModel

log = logging.getLogger(__name__)

LINKAGES = ("min", "mean", "max")
ROW_METHODS = ("gap", "ward")


@dataclass(frozen=True)
class ClusteringConfig:
    she_fraction: float = 0.3
    linkage: str = "min"
    iterations: int = 2
    rng_seed: int = 0
    row_method: str = "gap"
    horizon: int | None = None
    insignificant_size: int = 3

    def __post_init__(self):
        if not 0 < self.she_fraction <= 1:
            raise ValueError("she_fraction must lie in (0, 1]")
        if self.linkage not in LINKAGES:
            raise ValueError(f"linkage must be one of {LINKAGES}")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.row_method not in ROW_METHODS:
            raise ValueError(f"row_method must be one of {ROW_METHODS}")


@dataclass
class ClusterSet:
    """Disjoint clusters of node indices, ordered by smallest member."""

    clusters: list[frozenset[int]]

    def __post_init__(self):
        self.clusters = sorted((frozenset(c) for c in self.clusters if c), key=min)

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def assignment(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.clusters) for v in c}

    def covered(self) -> set[int]:
        return set().union(*self.clusters) if self.clusters else set()

    def is_partition_of(self, n: int) -> bool:
        sizes = sum(len(c) for c in self.clusters)
        return sizes == n and self.covered() == set(range(n))

    def labelled(self, labels: Sequence[str]) -> list[list[str]]:
        return [[labels[v] for v in sorted(c)] for c in self.clusters]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


@dataclass
class RawCluster:
    query: int
    members: frozenset[int]
    sigma: float


@dataclass
class TieEvent:
    """One firing of the random tie-break during pruning.

    ``query`` and ``candidates`` index nodes at level 0 and supernodes of the
    previous level otherwise.
    """

    level: int
    query: int
    candidates: list[list[int]]
    chosen: int


@dataclass
class Level:
    clusters: ClusterSet
    merges: list[list[int]]
    matrix: np.ndarray | None = None


@dataclass
class AgglomerationTrace:
    levels: list[Level]
    fixpoint: bool = False
    ties: list[TieEvent] = field(default_factory=list)

    @property
    def final(self) -> ClusterSet:
        return self.levels[-1].clusters


# --------------------------------------------------------------------------- stage 1 building blocks

def hub_count(n: int, she_fraction: float) -> int:
    return min(n, math.ceil(she_fraction * n - 1e-9))


def select_high_entropy_set(values: np.ndarray, she_fraction: float | None = None, count: int | None = None) -> frozenset[int]:
    """Indices of the ceil(f n) (or ``count``) largest values; ties go to the smaller index."""
    values = np.asarray(values, dtype=float)
    n = values.size
    k = hub_count(n, she_fraction) if count is None else min(n, count)
    order = np.lexsort((np.arange(n), -values))
    return frozenset(int(i) for i in order[:k])


def _gap_labels(x: np.ndarray, k: int) -> np.ndarray:
    # single linkage in 1-D: cut the k-1 widest gaps between sorted values
    order = np.argsort(x, kind="stable")
    xs = x[order]
    gaps = np.diff(xs)
    cut = np.sort(np.argsort(-gaps, kind="stable")[: k - 1])
    lab_sorted = np.zeros(x.size, dtype=np.int64)
    for c in cut:
        lab_sorted[c + 1 :] += 1
    labels = np.empty_like(lab_sorted)
    labels[order] = lab_sorted
    return labels


def _ward_labels(x: np.ndarray, k: int) -> np.ndarray:
    Z = hlinkage(x.reshape(-1, 1), method="ward")
    return fcluster(Z, t=k, criterion="maxclust") - 1


def cluster_row_1d(row: np.ndarray, method: str = "gap", max_groups: int = 3) -> list[tuple[np.ndarray, float]]:
    """Group the scalar entries of ``row`` into at most three bands.

    Returns ``(indices, mean value)`` per group, sorted by increasing mean.
    """
    x = np.asarray(row, dtype=float)
    k = min(max_groups, np.unique(x).size)
    if k <= 1:
        return [(np.arange(x.size), float(x.mean()))]
    labels = _gap_labels(x, k) if method == "gap" else _ward_labels(x, k)
    groups = []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        groups.append((idx, float(x[idx].mean())))
    groups.sort(key=lambda g: (g[1], g[0][0]))
    return groups


def query_groups(row: np.ndarray, query: int, method: str = "gap") -> list[tuple[np.ndarray, float]]:
    """1-D groups over every node except the query itself.

    The query's own absorption probability dominates its row, so it is left
    out of the grouping and re-attached by :func:`pick_raw_cluster`.
    """
    row = np.asarray(row, dtype=float)
    others = np.delete(np.arange(row.size), query)
    if others.size == 0:
        return [(np.array([query]), float(row[query]))]
    return [(others[idx], mean) for idx, mean in cluster_row_1d(row[others], method)]


def pick_raw_cluster(groups, query: int, row: np.ndarray) -> RawCluster:
    """The group with the highest mean value, plus the query node.

    Nodes the query cannot reach (zero probability) are never members, so an
    isolated query yields a singleton and sigma stays positive.
    """
    row = np.asarray(row)
    idx, _ = max(groups, key=lambda g: g[1])
    members = frozenset(int(i) for i in idx if row[i] > 0) | {query}
    sigma = float(np.min(np.asarray(row)[sorted(members)]))
    return RawCluster(query, members, sigma)


def process_raw_cluster(
    raw: RawCluster,
    she: frozenset[int],
    clusters: Sequence[frozenset[int]],
    row: np.ndarray,
    rng: np.random.Generator,
    ties: list[TieEvent] | None = None,
    level: int = 0,
) -> frozenset[int]:
    """Prune a raw cluster against hub nodes and existing clusters."""
    vq = raw.query
    S = set(raw.members)
    if vq in she and clusters:
        overlaps = [len(c & S) for c in clusters]
        best = max(overlaps)
        if best > 0:
            top = [i for i, o in enumerate(overlaps) if o == best]
            if len(top) > 1:
                chosen = top[int(rng.integers(len(top)))]
                event = TieEvent(level, vq, [sorted(clusters[i]) for i in top], chosen)
                log.info("random tie-break at level %d, query %d: %d candidate clusters, chose %d", level, vq, len(top), chosen)
                if ties is not None:
                    ties.append(event)
            else:
                chosen = top[0]
            for i, c in enumerate(clusters):
                if i != chosen:
                    S -= c
    hubs = [h for h in S if h in she and h != vq]
    if len(hubs) > 1:
        vals = np.asarray(row)[hubs]
        keep = {h for h, v in zip(hubs, vals) if v == vals.max()}
        S -= set(hubs) - keep
    return frozenset(S)


def _merge_into(clusters: list[frozenset[int]], S: frozenset[int]) -> tuple[list[frozenset[int]], list[int]]:
    hit = [i for i, c in enumerate(clusters) if c & S]
    if not hit:
        return clusters + [S], []
    merged = S.union(*(clusters[i] for i in hit))
    rest = [c for i, c in enumerate(clusters) if i not in hit]
    return rest + [merged], hit


def _query_loop(
    rows: Callable[[int], np.ndarray],
    values: np.ndarray,
    n_hubs: int,
    method: str,
    rng: np.random.Generator,
    ties: list[TieEvent],
    restrict: Callable[[int, frozenset[int]], frozenset[int]] | None = None,
    level: int = 0,
) -> list[frozenset[int]]:
    n = values.size
    she = select_high_entropy_set(values, count=n_hubs)
    queue = [int(i) for i in np.lexsort((np.arange(n), values))]
    pending = set(queue)
    clusters: list[frozenset[int]] = []
    for vq in queue:
        if vq not in pending:
            continue
        row = rows(vq)
        raw = pick_raw_cluster(query_groups(row, vq, method), vq, row)
        S = process_raw_cluster(raw, she, clusters, row, rng, ties, level)
        if restrict is not None:
            S = restrict(vq, S)
        pending -= S
        pending.discard(vq)
        clusters, _ = _merge_into(clusters, S)
    return clusters


def prob_dist_clustering(model: EntropicModel, config: ClusteringConfig = ClusteringConfig(), ties: list[TieEvent] | None = None) -> ClusterSet:
    """Stage 1: query-node centric local clusters covering every node."""
    Pi = model.distribution(config.horizon).matrix
    c = model.centrality(config.horizon).values
    rng = np.random.default_rng(config.rng_seed)
    ties = [] if ties is None else ties
    return ClusterSet(_query_loop(lambda u: Pi[u], c, hub_count(c.size, config.she_fraction), config.row_method, rng, ties))


# --------------------------------------------------------------------------- stage 2

def supernode_matrix(Pi: np.ndarray, clusters: Sequence[frozenset[int]], linkage: str = "min") -> np.ndarray:
    """Inter-supernode values from ``Pi`` under min, mean or max linkage."""
    reduce = {"min": np.min, "mean": np.mean, "max": np.max}[linkage]
    members = [np.array(sorted(c)) for c in clusters]
    k = len(members)
    M = np.empty((k, k))
    for i, a in enumerate(members):
        block = Pi[a]
        for j, b in enumerate(members):
            M[i, j] = reduce(block[:, b])
    return M


def _supernode_adjacency(und: sp.csr_matrix, clusters: Sequence[frozenset[int]]) -> sp.csr_matrix:
    n = und.shape[0]
    k = len(clusters)
    owner = np.empty(n, dtype=np.int64)
    for i, c in enumerate(clusters):
        owner[list(c)] = i
    A = und.tocoo()
    S = sp.coo_matrix((np.ones(A.nnz), (owner[A.row], owner[A.col])), shape=(k, k)).tocsr()
    return S


def _connected_restrictor(adj: sp.csr_matrix):
    def restrict(vq: int, S: frozenset[int]) -> frozenset[int]:
        nodes = sorted(S)
        if len(nodes) == 1:
            return S
        _, comp = connected_components(adj[nodes][:, nodes], directed=False)
        home = comp[nodes.index(vq)]
        return frozenset(v for v, c in zip(nodes, comp) if c == home)

    return restrict


def agglomerate(
    model: EntropicModel,
    initial: ClusterSet,
    config: ClusteringConfig = ClusteringConfig(),
    ties: list[TieEvent] | None = None,
) -> AgglomerationTrace:
    """Stage 2: repeat the query loop over supernodes for ``config.iterations`` rounds.

    A supernode's centrality is the mean of its members; the value between
    two supernodes is the min (or mean/max) absorption probability over
    member pairs. The number of hub supernodes is the stage-1 count N, capped
    by the number of supernodes. Merged groups are kept weakly connected in the original
    graph by restricting each local cluster to the component of its query.
    """
    Pi = model.distribution(config.horizon).matrix
    c = model.centrality(config.horizon).values
    und = model.graph.undirected_adjacency()
    rng = np.random.default_rng(config.rng_seed + 1)
    ties = [] if ties is None else ties
    trace = AgglomerationTrace([Level(initial, [])], ties=ties)
    current = list(initial.clusters)
    # the hub budget N stays fixed across levels
    n_hubs = hub_count(c.size, config.she_fraction)
    for level in range(1, config.iterations + 1):
        M = supernode_matrix(Pi, current, config.linkage)
        vals = np.array([c[list(s)].mean() for s in current])
        adj = _supernode_adjacency(und, current)
        groups = _query_loop(lambda i: M[i], vals, n_hubs, config.row_method, rng, ties, _connected_restrictor(adj), level)
        merges = sorted(sorted(g) for g in groups if len(g) > 1)
        new = ClusterSet([frozenset().union(*(current[i] for i in g)) for g in groups])
        if not merges:
            trace.fixpoint = True
            break
        trace.levels.append(Level(new, merges, M))
        current = list(new.clusters)
    return trace


@dataclass
class ClusteringResult:
    labels: tuple[str, ...]
    config: ClusteringConfig
    model_config: dict
    trace: AgglomerationTrace

    @property
    def clusters(self) -> ClusterSet:
        return self.trace.final

    def to_json(self) -> str:
        levels = [
            {"clusters": lv.clusters.labelled(self.labels), "merges": lv.merges}
            for lv in self.trace.levels
        ]
        small = [i for i, cl in enumerate(self.clusters.clusters) if len(cl) < self.config.insignificant_size]
        doc = {
            "config": {**self.model_config, **asdict(self.config)},
            "levels": levels,
            "clusters": self.clusters.labelled(self.labels),
            "flags": {
                "fixpoint": self.trace.fixpoint,
                "insignificant": small,
                "random_tie_breaks": [
                    {"level": e.level, "query": e.query, "candidates": e.candidates, "chosen": e.chosen}
                    for e in self.trace.ties
                ],
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_dot(self) -> str:
        return cluster_dot(self.labels, self.clusters, None)


def cluster_graph(model: EntropicModel, config: ClusteringConfig = ClusteringConfig()) -> ClusteringResult:
    """Full pipeline: stage 1 followed by ``config.iterations`` rounds of stage 2."""
    ties: list[TieEvent] = []
    initial = prob_dist_clustering(model, config, ties)
    trace = agglomerate(model, initial, config, ties)
    return ClusteringResult(model.graph.labels, config, model.config(), trace)


def subgraph_recluster(model: EntropicModel, clusters: ClusterSet, k_largest: int, config: ClusteringConfig = ClusteringConfig()) -> ClusterSet:
    """Re-run the pipeline inside each of the ``k_largest`` clusters and splice the results back."""
    if k_largest <= 0:
        return clusters
    order = sorted(range(len(clusters)), key=lambda i: (-len(clusters.clusters[i]), min(clusters.clusters[i])))
    chosen = set(order[:k_largest])
    out = []
    for i, cl in enumerate(clusters.clusters):
        if i not in chosen or len(cl) < 2:
            out.append(cl)
            continue
        nodes = sorted(cl)
        sub = EntropicModel(model.graph.subgraph(nodes), model.alpha, model.mu, model.absorption)
        refined = cluster_graph(sub, config).clusters
        out.extend(frozenset(nodes[j] for j in c) for c in refined)
    return ClusterSet(out)


# --------------------------------------------------------------------------- export

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def cluster_dot(labels: Sequence[str], clusters: ClusterSet, edges=None) -> str:
    lines = ["graph clusters {", "  node [style=filled];"]
    for i, cl in enumerate(clusters.clusters):
        colour = _PALETTE[i % len(_PALETTE)]
        for v in sorted(cl):
            lines.append(f'  "{labels[v]}" [fillcolor="{colour}", cluster={i}];')
    for u, v in edges or ():
        lines.append(f'  "{labels[u]}" -- "{labels[v]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_clusters(result: ClusteringResult, out_dir: str | Path, graph=None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "clusters.json").write_text(result.to_json(), encoding="utf-8")
    edges = None
    if graph is not None:
        und = sp.triu(graph.undirected_adjacency(), k=1).tocoo()
        edges = sorted(zip(und.row.tolist(), und.col.tolist()))
    (out / "clusters.dot").write_text(cluster_dot(result.labels, result.clusters, edges), encoding="utf-8")
