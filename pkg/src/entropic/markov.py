"""Absorbing random-walk chain: transition matrix, absorption vector, finite and asymptotic propagation.

The augmented chain over ``2n`` states is never materialised. Everything is
expressed through the transient block ``Pt = (I - D) P`` and the diagonal
absorption vector ``D``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import DirectedWeightedGraph, WeightTransform, out_degree, weighted_out_degree

# tolerance ladder
CONSTRUCTION_TOL = 1e-12
RESIDUAL_TOL = 1e-10
ROW_SUM_TOL = 1e-9

DENSE_THRESHOLD = 512


class NumericalError(RuntimeError):
    """The absorption system could not be solved to the required accuracy."""


@dataclass(frozen=True)
class AbsorptionModel:
    """How the per-node stopping probability ``D_uu`` is chosen.

    ``constant``: D_uu = a. ``degree``: D_uu = 1/(d_out(u)+1).
    ``wdegree``: D_uu = 1/(d_w,out(u)+1) on alpha-transformed weights.
    """

    kind: str = "degree"
    a: float | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "degree", "wdegree"):
            raise ValueError(f"unknown absorption model {self.kind!r}")
        if self.kind == "constant":
            if self.a is None or not 0.0 < self.a < 1.0:
                raise ValueError(f"constant absorption needs 0 < a < 1, got {self.a}")

    @classmethod
    def constant(cls, a: float) -> "AbsorptionModel":
        return cls("constant", float(a))

    @classmethod
    def degree(cls) -> "AbsorptionModel":
        return cls("degree")

    @classmethod
    def weighted_degree(cls) -> "AbsorptionModel":
        return cls("wdegree")

    def __str__(self):
        return f"const:{self.a:g}" if self.kind == "constant" else self.kind


def parse_absorption(spec: str) -> AbsorptionModel:
    """``const:<a>`` | ``degree`` | ``wdegree``."""
    spec = spec.strip().lower()
    if spec == "degree":
        return AbsorptionModel.degree()
    if spec == "wdegree":
        return AbsorptionModel.weighted_degree()
    if spec.startswith("const:"):
        return AbsorptionModel.constant(float(spec[6:]))
    raise ValueError(f"bad absorption spec {spec!r} (expected const:<a>|degree|wdegree)")


def build_transition(g: DirectedWeightedGraph, alpha: WeightTransform = WeightTransform.unit()) -> sp.csr_matrix:
    """Row-stochastic P with P_uv = alpha(w(u,v)) / sum_x alpha(w(u,x))."""
    a = g.adjacency
    vals = alpha(a.data)
    if np.any(~np.isfinite(vals)) or np.any(vals < 0):
        raise ValueError("weight transform produced negative or non-finite values")
    sums = weighted_out_degree(g, alpha=alpha)
    bad = np.flatnonzero(sums <= 0)
    if bad.size:
        raise ValueError(f"node {g.labels[bad[0]]!r} has zero total transformed out-weight")
    row_of = np.repeat(np.arange(g.n), np.diff(a.indptr))
    P = sp.csr_matrix((vals / sums[row_of], a.indices.copy(), a.indptr.copy()), shape=a.shape)
    return P


def build_absorption(g: DirectedWeightedGraph, model: AbsorptionModel, alpha: WeightTransform = WeightTransform.unit()) -> np.ndarray:
    """Vector of D_uu for every node."""
    if model.kind == "constant":
        return np.full(g.n, model.a)
    if model.kind == "degree":
        deg = out_degree(g).astype(float)
    else:
        deg = weighted_out_degree(g, alpha=alpha)
    D = 1.0 / (deg + 1.0)
    if np.any(D <= 0) or np.any(D >= 1):
        raise ValueError("absorption probabilities must lie strictly inside (0, 1)")
    return D


def effective_transition(P: sp.spmatrix, D: np.ndarray) -> sp.csr_matrix:
    """Transient block (I - D) P."""
    D = np.asarray(D, dtype=float)
    if P.shape[0] != D.shape[0]:
        raise ValueError("dimension mismatch between P and D")
    return sp.csr_matrix(sp.diags(1.0 - D) @ P)


@dataclass(frozen=True)
class AbsorptionChain:
    """The (P, D, Pt) triple for one graph under one (alpha, absorption) choice."""

    P: sp.csr_matrix
    D: np.ndarray
    Pt: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def check(self, tol: float = CONSTRUCTION_TOL) -> None:
        rows = np.asarray(self.P.sum(axis=1)).ravel()
        if np.abs(rows - 1).max(initial=0) > tol:
            raise NumericalError("transition matrix rows do not sum to 1")
        trows = np.asarray(self.Pt.sum(axis=1)).ravel()
        if np.abs(trows - (1 - self.D)).max(initial=0) > tol:
            raise NumericalError("effective transition rows do not sum to 1 - D")


def build_chain(
    g: DirectedWeightedGraph,
    alpha: WeightTransform = WeightTransform.unit(),
    absorption: AbsorptionModel = AbsorptionModel.degree(),
) -> AbsorptionChain:
    P = build_transition(g, alpha)
    D = build_absorption(g, absorption, alpha)
    chain = AbsorptionChain(P, D, effective_transition(P, D))
    chain.check()
    return chain


# --------------------------------------------------------------------------- propagation

@dataclass(frozen=True)
class FiniteHorizon:
    """Blocks of the t-step augmented matrix for the selected source rows.

    ``transient[i, v]`` is the probability of sitting at ``v`` after ``t`` steps
    from ``rows[i]``; ``absorbed[i, v]`` the probability of having been
    absorbed at ``v`` within ``t`` steps.
    """

    t: int
    rows: np.ndarray
    transient: np.ndarray
    absorbed: np.ndarray

    @property
    def combined(self) -> np.ndarray:
        return self.transient + self.absorbed


def propagate_finite(Pt: sp.spmatrix, D: np.ndarray, t: int, rows=None) -> FiniteHorizon:
    """Pt^t and (sum_{j<t} Pt^j) D, restricted to ``rows`` (all rows by default).

    Iterates row vectors through ``Pt``; cost is O(t * |rows| * nnz/n).
    """
    if int(t) != t or t < 1:
        raise ValueError(f"horizon must be a positive integer, got {t}")
    n = Pt.shape[0]
    rows = np.arange(n) if rows is None else np.atleast_1d(np.asarray(rows, dtype=np.int64))
    D = np.asarray(D, dtype=float)
    X = np.zeros((rows.size, n))
    X[np.arange(rows.size), rows] = 1.0
    B = np.zeros_like(X)
    PtT = sp.csr_matrix(Pt.T)
    for _ in range(int(t)):
        B += X * D[None, :]
        X = np.asarray((PtT @ X.T).T)
    total = X.sum(axis=1) + B.sum(axis=1)
    if np.abs(total - 1).max(initial=0) > ROW_SUM_TOL:
        raise NumericalError("finite-horizon rows do not sum to 1")
    return FiniteHorizon(int(t), rows, X, B)


def asymptotic_absorption(Pt: sp.spmatrix, D: np.ndarray, dense_threshold: int = DENSE_THRESHOLD) -> np.ndarray:
    """Absorption matrix (I - Pt)^{-1} D.

    Factorises ``I - Pt`` once (dense LU below ``dense_threshold`` nodes, sparse
    LU above) and solves for all right-hand sides. Raises
    :class:`NumericalError` when the system is singular or the residual or row
    sums are off.
    """
    D = np.asarray(D, dtype=float)
    n = Pt.shape[0]
    if np.any(D <= 0):
        raise NumericalError("every absorption probability must be positive")
    A = sp.identity(n, format="csc") - sp.csc_matrix(Pt)
    rhs = np.diag(D)
    try:
        if n < dense_threshold:
            lu = sla.lu_factor(A.toarray(), check_finite=True)
            if np.any(np.abs(np.diag(lu[0])) < 1e-300):
                bad = int(np.argmin(np.abs(np.diag(lu[0]))))
                raise NumericalError(f"singular system: zero pivot at position {bad}")
            Pi = sla.lu_solve(lu, rhs)
        else:
            Pi = spla.splu(A).solve(rhs)
    except (np.linalg.LinAlgError, RuntimeError, ValueError) as exc:
        if isinstance(exc, NumericalError):
            raise
        raise NumericalError(f"absorption solve failed: {exc}") from exc
    resid = np.abs(A @ Pi - rhs).max(initial=0)
    if not np.isfinite(resid) or resid > RESIDUAL_TOL:
        raise NumericalError(f"absorption solve residual {resid:.3e} exceeds {RESIDUAL_TOL:g}")
    rows = Pi.sum(axis=1)
    if np.abs(rows - 1).max(initial=0) > ROW_SUM_TOL:
        raise NumericalError("absorption rows do not sum to 1")
    # clip round-off below zero
    np.clip(Pi, 0.0, 1.0, out=Pi)
    return Pi


@dataclass(frozen=True)
class AbsorptionDistribution:
    """Row distributions used for centrality and clustering.

    ``matrix[u, v]`` is the asymptotic absorption probability at ``v`` (when
    ``horizon`` is None) or ``p~^(t)_uv + p^(t)_uv'`` at a finite horizon.
    """

    matrix: np.ndarray
    horizon: int | None = None

    @property
    def is_asymptotic(self) -> bool:
        return self.horizon is None

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


def absorption_distribution(chain: AbsorptionChain, horizon: int | None = None, dense_threshold: int = DENSE_THRESHOLD) -> AbsorptionDistribution:
    if horizon is None:
        return AbsorptionDistribution(asymptotic_absorption(chain.Pt, chain.D, dense_threshold))
    fh = propagate_finite(chain.Pt, chain.D, horizon)
    return AbsorptionDistribution(fh.combined, int(horizon))


# --------------------------------------------------------------------------- bound oracles

def transitivity_slack(Pi: np.ndarray, Pt, D: np.ndarray, u: int, v: int, w: int) -> float:
    """pi_uw - (pt_uw D_ww + pi_uv pi_vw / D_vv); the stated transitivity lower bound."""
    if u == v:
        raise ValueError("transitivity bound needs u != v")
    if u == w:
        raise ValueError("transitivity bound needs u != w")
    ptuw = Pt[u, w]
    bound = ptuw * D[w] + Pi[u, v] * Pi[v, w] / D[v]
    return float(Pi[u, w] - bound)


def verify_transitivity_bound(Pi: np.ndarray, Pt, D: np.ndarray, u: int, v: int, w: int, tol: float = 1e-10) -> tuple[bool, float]:
    """Check pi_uw >= pt_uw D_ww + pi_uv pi_vw / D_vv; returns (holds, slack).

    The inequality can fail when walks from ``u`` revisit ``v`` before reaching
    ``w``: ``pi_uv / D_vv`` is the expected number of visits to ``v``, not the
    probability of reaching it. :func:`first_passage_transitivity_slack` gives
    the version that always holds.
    """
    slack = transitivity_slack(Pi, Pt, D, u, v, w)
    return slack >= -tol, slack


def first_passage_transitivity_slack(Pi: np.ndarray, Pt, D: np.ndarray, u: int, v: int, w: int) -> float:
    """pi_uw - (pt_uw D_ww + f_uv pi_vw) with f_uv the probability of ever reaching v.

    Uses f_uv = N_uv / N_vv = (pi_uv / D_vv) / (pi_vv / D_vv) = pi_uv / pi_vv.
    Holds for distinct u, v, w.
    """
    if len({u, v, w}) < 3:
        raise ValueError("first-passage bound needs distinct u, v, w")
    f_uv = Pi[u, v] / Pi[v, v]
    return float(Pi[u, w] - (Pt[u, w] * D[w] + f_uv * Pi[v, w]))


def step_bounds(P, D: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sandwich for p~^(t) from the un-absorbed powers P^t.

    Returns (lower, upper, Pt_power) where
    lower = (1-D_u) min(1-D)^{t-1} P^t, upper = (1-D_u) max(1-D)^{t-1} P^t.
    """
    D = np.asarray(D, dtype=float)
    Pd = P.toarray() if sp.issparse(P) else np.asarray(P)
    Ptd = (1 - D)[:, None] * Pd
    Pt_pow = np.linalg.matrix_power(Ptd, t)
    P_pow = np.linalg.matrix_power(Pd, t)
    keep = (1 - D)[:, None]
    lo = keep * (1 - D).min() ** (t - 1) * P_pow
    hi = keep * (1 - D).max() ** (t - 1) * P_pow
    return lo, hi, Pt_pow


def absorption_bounds(P, D: np.ndarray, T: int = 1000) -> tuple[np.ndarray, np.ndarray]:
    """Geometric-sum envelopes for pi_uw (u != w), truncated at ``T`` terms.

    lower = (1-D_u) sum_{t=1..T} min(1-D)^{t-1} P^t_uw D_w. The upper envelope
    adds the tail bound (1-D_u) D_w max^T / (1 - max) so truncation never makes
    it too small.
    """
    D = np.asarray(D, dtype=float)
    Pd = P.toarray() if sp.issparse(P) else np.asarray(P)
    lo_r, hi_r = (1 - D).min(), (1 - D).max()
    n = Pd.shape[0]
    acc_lo = np.zeros((n, n))
    acc_hi = np.zeros((n, n))
    Pk = np.eye(n)
    f_lo = f_hi = 1.0
    for _ in range(T):
        Pk = Pk @ Pd
        acc_lo += f_lo * Pk
        acc_hi += f_hi * Pk
        f_lo *= lo_r
        f_hi *= hi_r
        if f_lo < 1e-300 and f_hi < 1e-18:
            break
    keep = (1 - D)[:, None]
    lower = keep * acc_lo * D[None, :]
    upper = keep * (acc_hi + f_hi / (1 - hi_r)) * D[None, :]
    return lower, upper


def write_coo(matrix, path: str | Path, labels=None) -> None:
    """Dump nonzeros as ``row col value`` lines."""
    m = sp.coo_matrix(matrix)
    names = (lambda i: labels[i]) if labels is not None else (lambda i: str(i))
    lines = [f"{names(r)} {names(c)} {v:.17g}" for r, c, v in zip(m.row, m.col, m.data)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
