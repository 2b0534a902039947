"""Markov entropic centrality, centralization and row-distribution diagnostics."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import DirectedWeightedGraph, NodeWeightFunction, WeightTransform, node_weights, out_degree
from .markov import (
    AbsorptionChain,
    AbsorptionDistribution,
    AbsorptionModel,
    absorption_distribution,
    build_chain,
    propagate_finite,
)

# max of -x log2 x, attained at x = 1/e
MAX_ENTROPY_TERM = 1.0 / (math.e * math.log(2.0))


def entropy_terms(q: np.ndarray) -> np.ndarray:
    """Elementwise -q log2 q with 0 log 0 = 0."""
    q = np.asarray(q, dtype=float)
    out = np.zeros_like(q)
    pos = q > 0
    out[pos] = -q[pos] * np.log2(q[pos])
    return out


def row_entropy(q: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray | float:
    terms = entropy_terms(q)
    if weights is not None:
        terms = terms * weights
    return terms.sum(axis=-1)


@dataclass
class CentralityProfile:
    """Per-node entropic centrality (bits) at one horizon (None means asymptotic)."""

    values: np.ndarray
    labels: tuple[str, ...]
    horizon: int | None = None
    config: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, label: str) -> float:
        return float(self.values[self.labels.index(str(label))])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.labels, self.values)}

    def ranking(self) -> np.ndarray:
        """Node indices by descending centrality, ties by index."""
        return np.lexsort((np.arange(len(self.values)), -self.values))


def entropic_centrality(
    dist: AbsorptionDistribution,
    mu: np.ndarray | None = None,
    source: int | None = None,
    labels: Sequence[str] | None = None,
    config: dict | None = None,
):
    """C(u) = -sum_v mu(v) q_uv log2 q_uv over the rows of ``dist``.

    With ``source`` set, returns a float for that row; otherwise a
    :class:`CentralityProfile` over all rows.
    """
    M = dist.matrix
    if source is not None:
        return float(row_entropy(M[source], mu))
    vals = row_entropy(M, mu)
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(M.shape[0]))
    return CentralityProfile(np.asarray(vals, dtype=float), labels, dist.horizon, dict(config or {}))


@dataclass
class EntropicModel:
    """A graph together with one (alpha, mu, absorption) configuration.

    Builds the chain lazily and caches the asymptotic absorption matrix so
    centrality and clustering share a single solve.
    """

    graph: DirectedWeightedGraph
    alpha: WeightTransform = field(default_factory=WeightTransform.unit)
    mu: NodeWeightFunction = field(default_factory=NodeWeightFunction.unit)
    absorption: AbsorptionModel = field(default_factory=AbsorptionModel.degree)
    _chain: AbsorptionChain | None = field(default=None, init=False, repr=False)
    _dists: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def chain(self) -> AbsorptionChain:
        if self._chain is None:
            self._chain = build_chain(self.graph, self.alpha, self.absorption)
        return self._chain

    @property
    def mu_vector(self) -> np.ndarray:
        return node_weights(self.graph, self.mu, self.alpha)

    def config(self) -> dict:
        return {"alpha": str(self.alpha), "mu": str(self.mu), "absorption": str(self.absorption)}

    def distribution(self, horizon: int | None = None) -> AbsorptionDistribution:
        if horizon not in self._dists:
            self._dists[horizon] = absorption_distribution(self.chain, horizon)
        return self._dists[horizon]

    def centrality(self, horizon: int | None = None) -> CentralityProfile:
        return entropic_centrality(self.distribution(horizon), self.mu_vector, labels=self.graph.labels, config=self.config())

    def centrality_series(self, t_max: int, nodes=None) -> list[CentralityProfile]:
        return centrality_series(self, t_max, nodes)


def centrality_series(model: EntropicModel, t_max: int, nodes=None) -> list[CentralityProfile]:
    """Profiles for t = 1..t_max followed by the asymptotic profile.

    With ``nodes`` (indices), only those rows are propagated and each profile
    holds values for those nodes in the given order.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    g = model.graph
    rows = np.arange(g.n) if nodes is None else np.asarray(nodes, dtype=np.int64)
    labels = tuple(g.labels[i] for i in rows)
    mu = model.mu_vector
    chain = model.chain
    out = []
    # one sweep: reuse the state of step t to produce step t+1
    PtT = chain.Pt.T.tocsr()
    X = np.zeros((rows.size, g.n))
    X[np.arange(rows.size), rows] = 1.0
    B = np.zeros_like(X)
    for t in range(1, t_max + 1):
        B += X * chain.D[None, :]
        X = np.asarray((PtT @ X.T).T)
        out.append(CentralityProfile(row_entropy(X + B, mu), labels, t, model.config()))
    Pi = model.distribution(None).matrix
    out.append(CentralityProfile(row_entropy(Pi[rows], mu), labels, None, model.config()))
    return out


# --------------------------------------------------------------------------- centralization

def centralization(profile: CentralityProfile, absorption: AbsorptionModel | None = None) -> float:
    """sum_v (C(v_hat) - C(v)) normalised by its star-graph maximum (n-1) log2 n.

    The normalisation is only established for degree-based absorption; other
    models trigger a warning.
    """
    _warn_if_not_degree(profile, absorption)
    c = np.asarray(profile.values, dtype=float)
    n = c.size
    if n < 2:
        return 0.0
    return float((c.max() - c).sum() / ((n - 1) * math.log2(n)))


@dataclass
class CentralizationSequence:
    labels: tuple[str, ...]
    values: np.ndarray

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.labels, self.values)}

    def summary(self) -> dict[str, float]:
        v = self.values
        return {"min": float(v.min()), "median": float(np.median(v)), "mean": float(v.mean()), "max": float(v.max())}


def centralization_sequence(profile: CentralityProfile, absorption: AbsorptionModel | None = None) -> CentralizationSequence:
    """Per-node sum_v (C(v_i) - C(v)) / (n log2 n), sorted ascending."""
    _warn_if_not_degree(profile, absorption)
    c = np.asarray(profile.values, dtype=float)
    n = c.size
    if n < 2:
        return CentralizationSequence(tuple(profile.labels), np.zeros(n))
    order = np.lexsort((np.arange(n), c))
    vals = (n * c - c.sum()) / (n * math.log2(n))
    return CentralizationSequence(tuple(profile.labels[i] for i in order), vals[order])


def _warn_if_not_degree(profile, absorption):
    kind = absorption.kind if absorption is not None else None
    if kind is None:
        spec = profile.config.get("absorption") if profile.config else None
        kind = "degree" if spec in (None, "degree") else spec
    if kind != "degree":
        warnings.warn(f"centralization normalisation is only established for degree-based absorption (got {kind})", stacklevel=3)


# --------------------------------------------------------------------------- row diagnostics

@dataclass
class RowDistributionSummary:
    source: int
    n: int
    below: int
    near_uniform: int
    above: int
    low_tail: float
    high_tail: float
    max_prob: float
    entropy: float
    gamma: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def analyze_row(Pi: np.ndarray, u: int, eps: float = 0.1) -> RowDistributionSummary:
    """Split row ``u`` around 1/n with a relative band ``eps``.

    ``gamma`` satisfies entropy = log2(n) / gamma (inf for a zero-entropy row).
    """
    row = np.asarray(Pi[u], dtype=float)
    n = row.size
    centre = 1.0 / n
    band = eps * centre
    near = np.abs(row - centre) <= band
    lo = (row < centre) & ~near
    hi = (row > centre) & ~near
    h = float(row_entropy(row))
    if h <= 0:
        gamma = math.inf
    else:
        gamma = math.log2(n) / h if n > 1 else 1.0
    return RowDistributionSummary(
        source=int(u),
        n=n,
        below=int(lo.sum()),
        near_uniform=int(near.sum()),
        above=int(hi.sum()),
        low_tail=float(row[lo].sum()),
        high_tail=float(row[hi].sum()),
        max_prob=float(row.max()),
        entropy=h,
        gamma=gamma,
    )


def scatter_data(dist: AbsorptionDistribution, profile: CentralityProfile) -> list[tuple[str, float, float]]:
    """(label, centrality, highest absorption probability) per node."""
    mx = dist.matrix.max(axis=1)
    return [(lab, float(c), float(m)) for lab, c, m in zip(profile.labels, profile.values, mx)]


def histogram_data(profile: CentralityProfile, bins: int = 10) -> list[tuple[float, float, int]]:
    """Counts of centralities normalised by the maximum, over uniform bins on [0, 1]."""
    v = np.asarray(profile.values, dtype=float)
    top = v.max() if v.size else 0.0
    norm = v / top if top > 0 else np.zeros_like(v)
    counts, edges = np.histogram(norm, bins=bins, range=(0.0, 1.0))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]


def out_degree_centrality(g: DirectedWeightedGraph) -> np.ndarray:
    """Out-neighbours excluding the self-loop, divided by n-1."""
    d = out_degree(g).astype(float)
    loops = ~np.isnan(g.self_loop_weights())
    d = d - loops
    return d / (g.n - 1) if g.n > 1 else np.zeros(g.n)


# --------------------------------------------------------------------------- emitters

def write_profile_csv(profile: CentralityProfile, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "value"])
        for lab, v in zip(profile.labels, profile.values):
            w.writerow([lab, f"{v:.10f}"])


def write_series_csv(series: list[CentralityProfile], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "t", "value"])
        for prof in series:
            t = "inf" if prof.horizon is None else prof.horizon
            for lab, v in zip(prof.labels, prof.values):
                w.writerow([lab, t, f"{v:.10f}"])


def write_scatter_csv(rows, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "centrality", "max_prob"])
        for lab, c, m in rows:
            w.writerow([lab, f"{c:.10f}", f"{m:.10f}"])


def write_histogram_csv(rows, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in rows:
            w.writerow([f"{lo:g}", f"{hi:g}", c])


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def model_for(graph: DirectedWeightedGraph, alpha="unit", mu="unit", absorption="degree") -> EntropicModel:
    """Convenience constructor accepting CLI-style spec strings."""
    from .graph import parse_alpha, parse_mu
    from .markov import parse_absorption

    a = parse_alpha(alpha) if isinstance(alpha, str) else alpha
    m = parse_mu(mu) if isinstance(mu, str) else mu
    d = parse_absorption(absorption) if isinstance(absorption, str) else absorption
    return EntropicModel(graph, a, m, d)


__all__ = [
    "CentralityProfile",
    "CentralizationSequence",
    "EntropicModel",
    "RowDistributionSummary",
    "analyze_row",
    "centrality_series",
    "centralization",
    "centralization_sequence",
    "entropic_centrality",
    "entropy_terms",
    "histogram_data",
    "model_for",
    "out_degree_centrality",
    "propagate_finite",
    "row_entropy",
    "scatter_data",
]
