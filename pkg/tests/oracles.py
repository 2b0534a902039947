"""Independent reference computations used to check the library.

Nothing here imports the solver paths under test: the series oracle uses
dense numpy powers, the Monte-Carlo oracle simulates walkers, and the
pair/rank oracles enumerate pairs explicitly.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np


def dense_chain(adj: np.ndarray, D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P, Pt) from a dense weighted adjacency that already has self-loops."""
    P = adj / adj.sum(axis=1, keepdims=True)
    return P, (1 - D)[:, None] * P


def truncated_series(Pt: np.ndarray, D: np.ndarray, T: int = 10000, tol: float = 0.0) -> np.ndarray:
    """sum_{j<T} Pt^j D by repeated multiplication (optionally stopping once terms vanish)."""
    n = Pt.shape[0]
    term = np.eye(n)
    acc = np.zeros((n, n))
    for _ in range(T):
        acc += term
        term = term @ Pt
        if tol and np.abs(term).max() < tol:
            break
    return acc * D[None, :]


def monte_carlo_absorption(P: np.ndarray, D: np.ndarray, source: int, walks: int, rng: np.random.Generator) -> np.ndarray:
    """Empirical absorption distribution of ``walks`` walkers started at ``source``.

    Each step a walker stops at its node with probability ``D`` and otherwise
    moves along a row of ``P``. Row sampling uses one global cumulative array
    with row ``u`` occupying the interval [u, u+1).
    """
    n = P.shape[0]
    rows, cols = np.nonzero(P)
    cum = np.empty(rows.size)
    for u in range(n):
        sel = rows == u
        c = np.cumsum(P[u, cols[sel]])
        c[-1] = 1.0
        cum[sel] = u + c
    # guard against round-off at the row end
    cum = np.minimum(cum, rows + 1.0)
    counts = np.zeros(n, dtype=np.int64)
    state = np.full(walks, source, dtype=np.int64)
    while state.size:
        stop = rng.random(state.size) < D[state]
        counts += np.bincount(state[stop], minlength=n)
        state = state[~stop]
        if not state.size:
            break
        pos = np.searchsorted(cum, state + rng.random(state.size), side="right")
        pos = np.minimum(pos, cols.size - 1)
        state = cols[pos]
    return counts / walks


def entropy_bits(p) -> float:
    return -sum(x * math.log2(x) for x in p if x > 0)


def brute_pair_counts(a: dict, b: dict) -> tuple[int, int, int, int]:
    keys = sorted(set(a) & set(b))
    tp = fp = fn = tn = 0
    for x, y in itertools.combinations(keys, 2):
        sa, sb = a[x] == a[y], b[x] == b[y]
        tp += sa and sb
        fp += sa and not sb
        fn += sb and not sa
        tn += not sa and not sb
    return tp, fp, fn, tn


def brute_f1(a: dict, b: dict) -> float:
    tp, fp, fn, _ = brute_pair_counts(a, b)
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return 2 * p * r / (p + r) if p + r else 0.0


def brute_kendall(a, b) -> float:
    disc = comp = 0
    for i, j in itertools.combinations(range(len(a)), 2):
        x, y = a[i] - a[j], b[i] - b[j]
        if x == 0 or y == 0:
            continue
        comp += 1
        disc += (x > 0) != (y > 0)
    return disc / comp


def random_digraph(n: int, p: float, rng: np.random.Generator, weighted: bool = False, directed: bool = True) -> np.ndarray:
    """Dense adjacency with every self-loop present (unit weight)."""
    A = (rng.random((n, n)) < p).astype(float)
    if not directed:
        A = np.triu(A, 1)
        A = A + A.T
    if weighted:
        W = rng.uniform(0.5, 5.0, size=(n, n))
        if not directed:
            W = np.triu(W, 1) + np.triu(W, 1).T
        A = A * W
    np.fill_diagonal(A, 1.0)
    return A


def edges_of(adj: np.ndarray):
    r, c = np.nonzero(adj)
    return [(str(u), str(v), float(adj[u, v])) for u, v in zip(r, c)]


def weakly_connected(adj: np.ndarray, nodes) -> bool:
    g = nx.Graph()
    nodes = list(nodes)
    g.add_nodes_from(nodes)
    s = set(nodes)
    for u in nodes:
        for v in np.flatnonzero(adj[u]):
            if int(v) in s and int(v) != u:
                g.add_edge(u, int(v))
    return nx.is_connected(g)
