"""Graph data model, edge-list/ground-truth ingestion and the weight tuning functions."""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp


class GraphParseError(ValueError):
    """Raised for malformed or invalid edge-list / label input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class DirectedWeightedGraph:
    """Directed graph with non-negative edge weights over dense node indices.

    ``adjacency`` is a CSR matrix whose row ``u`` holds the out-edges of ``u``.
    Explicit zero weights are kept as edges. ``labels[i]`` is the external
    label of index ``i``.
    """

    labels: tuple[str, ...]
    adjacency: sp.csr_matrix
    directed: bool = True
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if self.adjacency.shape != (n, n):
            raise ValueError(f"adjacency shape {self.adjacency.shape} does not match {n} labels")
        index = {label: i for i, label in enumerate(self.labels)}
        if len(index) != n:
            raise ValueError("node labels must be unique")
        if self.adjacency.nnz and self.adjacency.data.min() < 0:
            raise ValueError("edge weights must be non-negative")
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.n

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown node {label!r}") from None

    def has_label(self, label: str) -> bool:
        return str(label) in self._index

    def out_edges(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (targets, weights) of the out-edges of ``u``."""
        self._check(u)
        a = self.adjacency
        lo, hi = a.indptr[u], a.indptr[u + 1]
        return a.indices[lo:hi], a.data[lo:hi]

    def edges(self) -> Iterable[tuple[int, int, float]]:
        coo = self.adjacency.tocoo()
        yield from zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.nnz)

    def self_loop_weights(self) -> np.ndarray:
        """Weight of (u,u) per node, NaN where the loop is absent."""
        out = np.full(self.n, np.nan)
        coo = self.adjacency.tocoo()
        mask = coo.row == coo.col
        out[coo.row[mask]] = coo.data[mask]
        return out

    def has_all_self_loops(self) -> bool:
        return not np.isnan(self.self_loop_weights()).any()

    def subgraph(self, nodes: Iterable[int]) -> "DirectedWeightedGraph":
        """Induced subgraph, keeping the original relative order of ``nodes``."""
        idx = np.asarray(sorted(set(int(i) for i in nodes)), dtype=np.int64)
        sub = self.adjacency[idx][:, idx].tocsr()
        sub.sort_indices()
        return DirectedWeightedGraph(tuple(self.labels[i] for i in idx), sub, self.directed)

    def undirected_adjacency(self) -> sp.csr_matrix:
        """Boolean structure of the symmetrised graph (for weak connectivity)."""
        # zero-weight edges still count as links
        coo = self.adjacency.tocoo()
        s = sp.coo_matrix((np.ones(len(coo.row), dtype=bool), (coo.row, coo.col)), shape=self.adjacency.shape).tocsr()
        return (s + s.T).tocsr()

    def _check(self, u: int):
        if not 0 <= u < self.n:
            raise IndexError(f"node index {u} out of range for graph with {self.n} nodes")


# --------------------------------------------------------------------------- construction

def from_edges(
    edges: Iterable[tuple[str, str, float]],
    directed: bool = True,
    nodes: Sequence[str] = (),
    loop_weight: float | None = 1.0,
) -> DirectedWeightedGraph:
    """Build a graph from labelled edges.

    Parallel edges are merged by summing their weights. For ``directed=False``
    every edge is mirrored. Self-loops are then added with ``loop_weight``
    unless it is ``None``.
    """
    order: dict[str, int] = {}
    for label in nodes:
        order.setdefault(str(label), len(order))
    rows, cols, data = [], [], []
    for src, dst, w in edges:
        if w < 0:
            raise ValueError(f"negative weight {w} on edge {src}->{dst}")
        i = order.setdefault(str(src), len(order))
        j = order.setdefault(str(dst), len(order))
        rows.append(i)
        cols.append(j)
        data.append(float(w))
        if not directed and i != j:
            rows.append(j)
            cols.append(i)
            data.append(float(w))
    n = len(order)
    adj = sp.coo_matrix((np.asarray(data, dtype=float), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))), shape=(n, n)).tocsr()
    adj.sum_duplicates()
    adj.sort_indices()
    g = DirectedWeightedGraph(tuple(order), adj, directed)
    if loop_weight is not None:
        g = augment_self_loops(g, loop_weight)
    return g


def from_networkx(nx_graph, weight: str | None = None, loop_weight: float = 1.0) -> DirectedWeightedGraph:
    """Convert a networkx graph; direction follows ``nx_graph.is_directed()``."""
    directed = nx_graph.is_directed()
    edges = ((str(u), str(v), float(d.get(weight, 1.0)) if weight else 1.0) for u, v, d in nx_graph.edges(data=True))
    return from_edges(edges, directed=directed, nodes=[str(v) for v in nx_graph.nodes()], loop_weight=loop_weight)


def augment_self_loops(g: DirectedWeightedGraph, loop_weight: float = 1.0) -> DirectedWeightedGraph:
    """Give every node exactly one self-loop; existing loops keep their weight."""
    if loop_weight < 0:
        raise ValueError("loop weight must be non-negative")
    missing = np.flatnonzero(np.isnan(g.self_loop_weights()))
    if missing.size == 0:
        return g
    add = sp.coo_matrix((np.full(missing.size, float(loop_weight)), (missing, missing)), shape=g.adjacency.shape)
    adj = (g.adjacency.tocoo(copy=True))
    merged = sp.coo_matrix(
        (np.concatenate([adj.data, add.data]), (np.concatenate([adj.row, add.row]), np.concatenate([adj.col, add.col]))),
        shape=g.adjacency.shape,
    ).tocsr()
    merged.sort_indices()
    return DirectedWeightedGraph(g.labels, merged, g.directed)


_SPLIT = re.compile(r"[,\s]+")
_DIRECTED_FLAG = re.compile(r"^#\s*directed\s*=\s*(true|false)\s*$", re.IGNORECASE)


def directed_flag(text: str) -> bool | None:
    """Value of a ``# directed=true|false`` header line, if present."""
    for raw in text.splitlines():
        m = _DIRECTED_FLAG.match(raw.strip())
        if m:
            return m.group(1).lower() == "true"
    return None


def parse_edge_list(
    text: str | bytes | io.IOBase,
    directed: bool | None = None,
    default_weight: float = 1.0,
    loop_weight: float = 1.0,
) -> DirectedWeightedGraph:
    """Parse ``src dst [weight]`` lines (whitespace or comma separated).

    Lines starting with ``#`` and blank lines are skipped. Raises
    :class:`GraphParseError` carrying the 1-based line number for malformed
    lines or negative weights, and for input without any edge.
    ``directed=None`` reads a ``# directed=`` header and falls back to True.
    """
    if isinstance(text, io.IOBase):
        text = text.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if directed is None:
        flag = directed_flag(text)
        directed = True if flag is None else flag
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in _SPLIT.split(line) if p]
        if len(parts) not in (2, 3):
            raise GraphParseError(f"expected 'src dst [weight]', got {raw!r}", lineno)
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphParseError(f"weight {parts[2]!r} is not a number", lineno) from None
            if not math.isfinite(w):
                raise GraphParseError(f"weight {parts[2]!r} is not finite", lineno)
            if w < 0:
                raise GraphParseError(f"negative weight {w}", lineno)
        else:
            w = float(default_weight)
        edges.append((parts[0], parts[1], w))
    if not edges:
        raise GraphParseError("no edges found")
    return from_edges(edges, directed=directed, loop_weight=loop_weight)


def read_edge_list(path: str | Path, directed: bool | None = None, default_weight: float = 1.0, loop_weight: float = 1.0) -> DirectedWeightedGraph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"), directed, default_weight, loop_weight)


def write_edge_list(g: DirectedWeightedGraph, path: str | Path, include_self_loops: bool = False) -> None:
    """Write ``src dst weight`` lines; undirected graphs are written once per pair."""
    lines = [f"# directed={str(g.directed).lower()}"]
    for u, v, w in g.edges():
        if u == v and not include_self_loops:
            continue
        if not g.directed and v < u:
            continue
        lines.append(f"{g.labels[u]} {g.labels[v]} {w:g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_ground_truth(text: str) -> dict[str, int]:
    """Parse ``node_label cluster_id`` lines into a label -> cluster mapping."""
    out: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in _SPLIT.split(line) if p]
        if len(parts) != 2:
            raise GraphParseError(f"expected 'node cluster_id', got {raw!r}", lineno)
        try:
            cid = int(parts[1])
        except ValueError:
            raise GraphParseError(f"cluster id {parts[1]!r} is not an integer", lineno) from None
        if parts[0] in out:
            raise GraphParseError(f"node {parts[0]!r} listed twice", lineno)
        out[parts[0]] = cid
    return out


def read_ground_truth(path: str | Path) -> dict[str, int]:
    return parse_ground_truth(Path(path).read_text(encoding="utf-8"))


def write_ground_truth(labels: Mapping[str, int], path: str | Path) -> None:
    Path(path).write_text("".join(f"{k} {v}\n" for k, v in labels.items()), encoding="utf-8")


# --------------------------------------------------------------------------- tuning functions

@dataclass(frozen=True)
class WeightTransform:
    """Conversion function applied to edge weights: unit, identity or power."""

    kind: str = "unit"
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("unit", "identity", "power"):
            raise ValueError(f"unknown weight transform {self.kind!r}")

    @classmethod
    def unit(cls) -> "WeightTransform":
        return cls("unit")

    @classmethod
    def identity(cls) -> "WeightTransform":
        return cls("identity")

    @classmethod
    def power(cls, beta: float) -> "WeightTransform":
        return cls("power", float(beta))

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "unit":
            return np.ones_like(w)
        if self.kind == "identity" or self.beta == 1.0:
            return w.copy()
        with np.errstate(divide="ignore"):
            return np.power(w, self.beta)

    def __str__(self):
        return {"unit": "unit", "identity": "weight"}.get(self.kind, f"pow:{self.beta:g}")


@dataclass(frozen=True)
class NodeWeightFunction:
    """Per-destination multiplier of the entropy terms: unit, or (d_w,out/d_out)^gamma."""

    kind: str = "unit"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("unit", "ratio"):
            raise ValueError(f"unknown node weight function {self.kind!r}")

    @classmethod
    def unit(cls) -> "NodeWeightFunction":
        return cls("unit")

    @classmethod
    def degree_ratio(cls, gamma: float = 1.0) -> "NodeWeightFunction":
        return cls("ratio", float(gamma))

    def __str__(self):
        return "unit" if self.kind == "unit" else f"ratio:{self.gamma:g}"


def out_degree(g: DirectedWeightedGraph, u: int | None = None):
    """Number of out-neighbours (self-loop included). Vector when ``u`` is None."""
    deg = np.diff(g.adjacency.indptr)
    if u is None:
        return deg
    g._check(u)
    return int(deg[u])


def weighted_out_degree(g: DirectedWeightedGraph, u: int | None = None, alpha: WeightTransform = WeightTransform("identity")):
    """Sum of alpha(w) over the out-edges of ``u`` (self-loop included)."""
    a = g.adjacency
    vals = alpha(a.data)
    sums = np.add.reduceat(vals, a.indptr[:-1]) if vals.size else np.zeros(g.n)
    sums = np.where(np.diff(a.indptr) > 0, sums, 0.0)
    if u is None:
        return sums
    g._check(u)
    return float(sums[u])


def node_weights(g: DirectedWeightedGraph, mu: NodeWeightFunction, alpha: WeightTransform = WeightTransform("identity")) -> np.ndarray:
    """mu(v) for every node, with mu=1 where the out-degree is zero."""
    if mu.kind == "unit" or mu.gamma == 0:
        return np.ones(g.n)
    d = out_degree(g).astype(float)
    dw = weighted_out_degree(g, alpha=alpha)
    out = np.ones(g.n)
    nz = d > 0
    out[nz] = (dw[nz] / d[nz]) ** mu.gamma
    return out


def node_weight(g: DirectedWeightedGraph, u: int, mu: NodeWeightFunction, alpha: WeightTransform = WeightTransform("identity")) -> float:
    g._check(u)
    return float(node_weights(g, mu, alpha)[u])


def parse_alpha(spec: str) -> WeightTransform:
    """``unit`` | ``weight`` | ``pow:<beta>``."""
    spec = spec.strip().lower()
    if spec == "unit":
        return WeightTransform.unit()
    if spec in ("weight", "identity"):
        return WeightTransform.identity()
    if spec.startswith("pow:"):
        return WeightTransform.power(float(spec[4:]))
    raise ValueError(f"bad alpha spec {spec!r} (expected unit|weight|pow:<beta>)")


def parse_mu(spec: str) -> NodeWeightFunction:
    """``unit`` | ``ratio:<gamma>`` (``ratio`` alone means gamma=1)."""
    spec = spec.strip().lower()
    if spec == "unit":
        return NodeWeightFunction.unit()
    if spec == "ratio":
        return NodeWeightFunction.degree_ratio(1.0)
    if spec.startswith("ratio:"):
        return NodeWeightFunction.degree_ratio(float(spec[6:]))
    raise ValueError(f"bad mu spec {spec!r} (expected unit|ratio:<gamma>)")
