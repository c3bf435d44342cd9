"""Step 1 of the pipeline: strip isolated vertices, order the affinity into
block diagonal form by accumulated similarity, and optionally raise sparsity
until the two smallest eigenvalues sit near zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import AllOutliers, NoSparseCandidate, SingularDegree
from .matrix_core import EigenMode, SymmetricGraph, eig_smallest

SparsifyMethod = Literal["threshold", "pnn", "none"]

NEG_EIG_TOL = -1e-9


@dataclass(frozen=True)
class Type1Report:
    outlier_indices: tuple[int, ...]  # original indices with all-zero rows
    kept_indices: tuple[int, ...]  # reduced position -> original index


@dataclass(frozen=True)
class SparsifyConfig:
    method: SparsifyMethod = "pnn"
    t_ini: float = 0.5
    t_inc: float = 1e-3
    p_ini: int | None = None  # defaults to N - 2
    p_dec: int = 1
    n_min: int | None = None  # pnn sweep floor; required for method="pnn"
    lambda1_tol: float = 1e-3
    mode: EigenMode = "generalized"

    def __post_init__(self):
        if not 0 <= self.t_ini < 1:
            raise ValueError("t_ini must lie in [0, 1)")
        if self.t_inc <= 0 or self.p_dec <= 0:
            raise ValueError("sweep increments must be positive")
        if self.lambda1_tol <= 0:
            raise ValueError("lambda1_tol must be positive")


@dataclass(frozen=True)
class SparsifyInfo:
    method: SparsifyMethod
    accepted: bool  # False when the fallback candidate was used
    threshold: float | None = None
    p: int | None = None
    lambda0: float | None = None
    lambda1: float | None = None


def detect_type1(g: SymmetricGraph) -> tuple[Type1Report, SymmetricGraph]:
    """Remove vertices whose off-diagonal row is exactly zero."""
    isolated = np.all(g.W == 0.0, axis=1)
    outliers = np.flatnonzero(isolated)
    kept = np.flatnonzero(~isolated)
    if kept.size == 0:
        raise AllOutliers()
    reduced = SymmetricGraph(g.W[np.ix_(kept, kept)])
    report = Type1Report(
        outlier_indices=tuple(int(i) for i in outliers),
        kept_indices=tuple(int(i) for i in kept),
    )
    return report, reduced


def sbdo_order(g: SymmetricGraph) -> np.ndarray:
    """Greedy block diagonal ordering by accumulated similarity.

    Start at the vertex of maximum degree; repeatedly append the unselected
    vertex with the largest total similarity to the selected set, jumping to
    the unselected vertex of maximum degree whenever no positive similarity
    remains. Ties break toward the lowest index.
    """
    W = g.W
    n = g.n
    order = np.empty(n, dtype=int)
    selected = np.zeros(n, dtype=bool)

    first = int(np.argmax(g.degrees))
    order[0] = first
    selected[first] = True
    score = W[:, first].copy()

    for s in range(1, n):
        score_masked = np.where(selected, -np.inf, score)
        best = int(np.argmax(score_masked))
        if score_masked[best] <= 0.0:
            # no neighbor left: restart from the heaviest remaining vertex
            deg_masked = np.where(selected, -np.inf, g.degrees)
            best = int(np.argmax(deg_masked))
        order[s] = best
        selected[best] = True
        score += W[:, best]
    return order


def apply_order(g: SymmetricGraph, order: np.ndarray) -> SymmetricGraph:
    return SymmetricGraph(g.W[np.ix_(order, order)])


def _knn_prune(W: np.ndarray, p: int) -> np.ndarray:
    """Keep each row's p largest coefficients, symmetrized by union."""
    n = W.shape[0]
    keep = np.zeros_like(W, dtype=bool)
    for m in range(n):
        row = W[m].copy()
        row[m] = -np.inf
        top = np.argsort(-row, kind="stable")[:p]
        keep[m, top] = True
    keep |= keep.T
    out = np.where(keep, W, 0.0)
    np.fill_diagonal(out, 0.0)
    return out


def _candidate_eigs(W: np.ndarray, mode: EigenMode) -> tuple[float, float, float] | None:
    """(lambda0, lambda1, min lambda) of a sweep candidate, None when invalid.

    A candidate that isolates a vertex is invalid in generalized mode. The
    global minimum only needs computing when negative coefficients survived;
    a nonnegative affinity always yields a positive semi-definite Laplacian.
    """
    try:
        g = SymmetricGraph(W)
        spec2 = eig_smallest(g, mode, k=min(2, g.n))
    except SingularDegree:
        return None
    lam0 = float(spec2.eigenvalues[0])
    lam1 = float(spec2.eigenvalues[-1])
    if np.any(W < 0):
        full = eig_smallest(g, mode, k=g.n)
        lam_min = float(full.eigenvalues[0])
    else:
        lam_min = lam0
    return lam0, lam1, lam_min


def sparsify(g: SymmetricGraph, cfg: SparsifyConfig) -> tuple[SymmetricGraph, SparsifyInfo]:
    """Sweep a sparsity control until the two smallest eigenvalues are near zero.

    threshold: zero every coefficient below T, raising T from t_ini by t_inc;
    pnn: rebuild a p-nearest-neighbor graph, lowering p from p_ini by p_dec
    while p > n_min. A candidate is accepted when lambda1 < lambda1_tol and
    no eigenvalue is materially negative. The sparsest candidate with a
    nonnegative spectrum is retained as the fallback; with neither, the
    sweep fails.
    """
    if cfg.method == "none":
        return g, SparsifyInfo(method="none", accepted=True)

    n = g.n
    fallback: tuple[np.ndarray, SparsifyInfo] | None = None

    if cfg.method == "threshold":
        t = cfg.t_ini
        while t < 1.0:
            W_t = np.where(g.W < t, 0.0, g.W)
            np.fill_diagonal(W_t, 0.0)
            eigs = _candidate_eigs(W_t, cfg.mode)
            if eigs is not None:
                lam0, lam1, lam_min = eigs
                info = SparsifyInfo("threshold", True, threshold=t, lambda0=lam0, lambda1=lam1)
                if lam1 < cfg.lambda1_tol and lam_min >= NEG_EIG_TOL:
                    return SymmetricGraph(W_t), info
                if lam_min >= NEG_EIG_TOL:
                    fallback = (W_t, SparsifyInfo("threshold", False, threshold=t,
                                                  lambda0=lam0, lambda1=lam1))
            t += cfg.t_inc
        if fallback is not None:
            return SymmetricGraph(fallback[0]), fallback[1]
        raise NoSparseCandidate("Please start with a smaller threshold")

    if cfg.method == "pnn":
        if cfg.n_min is None:
            raise ValueError("pnn sparsification needs n_min")
        p = cfg.p_ini if cfg.p_ini is not None else n - 2
        if p >= n:
            raise ValueError("p_ini must be smaller than the vertex count")
        while p > cfg.n_min:
            W_p = _knn_prune(g.W, p)
            eigs = _candidate_eigs(W_p, cfg.mode)
            if eigs is not None:
                lam0, lam1, lam_min = eigs
                info = SparsifyInfo("pnn", True, p=p, lambda0=lam0, lambda1=lam1)
                if lam1 < cfg.lambda1_tol and lam_min >= NEG_EIG_TOL:
                    return SymmetricGraph(W_p), info
                if lam_min >= NEG_EIG_TOL:
                    fallback = (W_p, SparsifyInfo("pnn", False, p=p,
                                                  lambda0=lam0, lambda1=lam1))
            p -= cfg.p_dec
        if fallback is not None:
            return SymmetricGraph(fallback[0]), fallback[1]
        raise NoSparseCandidate("Please start with a greater p_ini")

    raise ValueError(f"unknown sparsify method: {cfg.method!r}")
