"""Step 2 of the pipeline: read block structure out of the row-sum vector.

The vector of a block diagonal Laplacian is piece-wise linear, one ramp per
block, and cross-block similarity shifts later ramps upward by a constant.
This module finds candidate segment boundaries with an exact penalized
least-squares changepoint solver, fits each segment by total least squares,
estimates the cross-block shift constants with medians, and picks the block
size vector whose assembled model comes closest to the observed vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import NoCandidates, NoFeasibleCandidate, VerticalSegment

# within-block coefficients must dominate cross-block ones by this factor
# before a candidate counts as feasible
FEASIBILITY_MARGIN = 0.98


@dataclass(frozen=True)
class ChangepointSet:
    tau: tuple[int, ...]  # 1-based last index of each segment but the final one
    gamma_used: float
    n_c: int


@dataclass(frozen=True)
class PlaneFit:
    theta: np.ndarray  # unit normal, second component positive
    bias: float
    slope: float

    def line(self, m: np.ndarray) -> np.ndarray:
        """Fitted values at abscissae m, from theta^T [m, v] + bias = 0."""
        return -(self.theta[0] * np.asarray(m, dtype=float) + self.bias) / self.theta[1]


@dataclass(frozen=True)
class VEstimate:
    v: np.ndarray
    v_hat: np.ndarray
    n_hat: tuple[int, ...]
    w_sim: np.ndarray
    residual: float
    k_cand: int
    feasible: bool


def _segment_cost_table(v: np.ndarray) -> np.ndarray:
    """cost[i, j] = SSE of the least-squares affine fit to v[i..j] (inclusive)."""
    n = len(v)
    m = np.arange(1, n + 1, dtype=float)
    z = np.zeros(1)
    cx = np.concatenate([z, np.cumsum(m)])
    cxx = np.concatenate([z, np.cumsum(m * m)])
    cy = np.concatenate([z, np.cumsum(v)])
    cyy = np.concatenate([z, np.cumsum(v * v)])
    cxy = np.concatenate([z, np.cumsum(m * v)])

    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    cnt = (j - i + 1).astype(float)
    sx = cx[j + 1] - cx[i]
    sxx = cxx[j + 1] - cxx[i]
    sy = cy[j + 1] - cy[i]
    syy = cyy[j + 1] - cyy[i]
    sxy = cxy[j + 1] - cxy[i]
    with np.errstate(divide="ignore", invalid="ignore"):
        cxx_c = sxx - sx * sx / cnt
        cxy_c = sxy - sx * sy / cnt
        cyy_c = syy - sy * sy / cnt
        cost = cyy_c - np.where(cxx_c > 0, cxy_c * cxy_c / np.where(cxx_c > 0, cxx_c, 1.0), 0.0)
    cost = np.where(j >= i, np.maximum(cost, 0.0), np.inf)
    return cost


def _solve_partition(cost: np.ndarray, gamma: float) -> list[int]:
    """Exact optimal-partitioning DP; returns 1-based interior boundaries."""
    n = cost.shape[0]
    F = np.empty(n + 1)
    F[0] = -gamma
    prev = np.zeros(n + 1, dtype=int)
    for t in range(1, n + 1):
        totals = F[:t] + cost[:t, t - 1] + gamma
        s = int(np.argmin(totals))
        F[t] = totals[s]
        prev[t] = s
    bounds = []
    t = n
    while t > 0:
        s = int(prev[t])
        if s > 0:
            bounds.append(s)
        t = s
    return sorted(bounds)


def solve_penalized(v: np.ndarray, gamma: float) -> tuple[int, ...]:
    """Exact minimizer of the penalized objective at one penalty value.

    Objective: sum over segments of the affine least-squares SSE, plus gamma
    per changepoint. Returns the 1-based interior boundaries.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) < 2:
        raise ValueError("need a 1-D vector of length >= 2")
    return tuple(_solve_partition(_segment_cost_table(v), gamma))


def detect_changepoints(v: np.ndarray, n_c_max: int, gamma0: float | None = None) -> ChangepointSet:
    """Collect boundaries along a doubling penalty ladder.

    gamma starts at 1e-6 * Var(v) (overridable) and doubles until the exact
    solver returns at most n_c_max changepoints; that solve fixes gamma_used.
    The reported set is the union of the accepted solve with every coarser
    solve further up the ladder: under noise a boundary cliff can be
    straddled by a cheap two-point segment at the accepted penalty while the
    exact boundary reappears once the penalty grows, and each coarser solve
    is still an exact minimizer of the same objective. A constant input has
    no structure and yields an empty set.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) < 2:
        raise ValueError("need a 1-D vector of length >= 2")
    var = float(np.var(v))
    if var == 0.0:
        return ChangepointSet(tau=(), gamma_used=0.0, n_c=0)
    gamma = float(gamma0) if gamma0 is not None else 1e-6 * var
    cost = _segment_cost_table(v)
    while True:
        bounds = _solve_partition(cost, gamma)
        if len(bounds) <= n_c_max:
            break
        gamma *= 2.0
    gamma_used = gamma
    collected = set(bounds)
    while bounds:
        gamma *= 2.0
        bounds = _solve_partition(cost, gamma)
        collected.update(bounds)
    tau = tuple(sorted(collected))
    return ChangepointSet(tau=tau, gamma_used=gamma_used, n_c=len(tau))


def candidate_sizes(cp: ChangepointSet, k_cand: int, n_min: int, total: int) -> np.ndarray:
    """All block size vectors reachable from (k_cand - 1)-subsets of the changepoints.

    Rows failing the minimum block size are dropped; an empty result raises.
    """
    if k_cand < 1:
        raise ValueError("k_cand must be positive")
    rows = []
    for subset in combinations(cp.tau, k_cand - 1):
        edges = np.array([0, *subset, total])
        sizes = np.diff(edges)
        if np.all(sizes >= n_min):
            rows.append(sizes)
    if not rows:
        raise NoFeasibleCandidate(
            f"no candidate size vector for k={k_cand} with minimum block size {n_min}"
        )
    return np.array(rows, dtype=int)


def _block_bounds(n_r: Sequence[int]) -> list[tuple[int, int]]:
    """0-based half-open [lo, hi) bounds of each block."""
    edges = np.concatenate([[0], np.cumsum(n_r)])
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def target_v_for_candidate(L: np.ndarray, n_r: Sequence[int]) -> np.ndarray:
    """Per-block row-sum ramps: upper-triangular sums confined to the block.

    Each block is treated as its own graph (row sums stop at the block's
    boundary on both sides, diagonal mass included only for within-block
    edges), so an exactly corrupted matrix with a correct candidate still
    yields the plain unshifted ramp of every block.
    """
    L = np.asarray(L, dtype=float)
    if int(np.sum(n_r)) != L.shape[0]:
        raise ValueError("candidate sizes must partition the index range")
    W = -np.array(L, dtype=float)
    np.fill_diagonal(W, 0.0)
    out = np.empty(L.shape[0])
    for lo, hi in _block_bounds(n_r):
        sub = W[lo:hi, lo:hi]
        out[lo:hi] = np.tril(sub, k=-1).sum(axis=1)  # within-block mass left of the diagonal
    return out


def fit_segment_plane(points: np.ndarray) -> PlaneFit:
    """Total-least-squares line through (m, v) pairs of one segment.

    The normal is the eigenvector of the 2x2 sample covariance's smallest
    eigenvalue, sign-normalized so its second component is positive; the
    slope is -theta_1 / theta_2.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (m, v) points")
    mu = pts.mean(axis=0)
    centered = pts - mu
    cov = centered.T @ centered / (pts.shape[0] - 1)
    _, vecs = np.linalg.eigh(cov)
    theta = vecs[:, 0]
    if abs(theta[1]) <= 1e-12:
        raise VerticalSegment()
    if theta[1] < 0:
        theta = -theta
    bias = -float(theta @ mu)
    slope = -float(theta[0] / theta[1])
    return PlaneFit(theta=theta, bias=bias, slope=slope)


def increase_vector(L: np.ndarray, bounds_i: tuple[int, int], bounds_j: tuple[int, int]) -> np.ndarray:
    """Cross-block row mass of block i against an earlier block j.

    Nonnegative whenever the affinity is nonnegative; a constant vector when
    the cross coefficients concentrate around one value.
    """
    lo_i, hi_i = bounds_i
    lo_j, hi_j = bounds_j
    return -np.asarray(L, dtype=float)[lo_i:hi_i, lo_j:hi_j].sum(axis=1)


def estimate_undesired(
    L: np.ndarray,
    n_r: Sequence[int],
    v_target: np.ndarray,
    fits: Sequence[PlaneFit],
) -> np.ndarray:
    """Median-based cross-block coefficients, returned as a full k x k matrix.

    For each later block i and earlier block j, the per-row cross mass is
    added to block i's segment of the within-block vector and compared with
    the fitted line; the median difference divided by block j's size is the
    coefficient estimate. The median keeps single contaminated rows from
    moving the estimate.
    """
    bounds = _block_bounds(n_r)
    k = len(bounds)
    w_sim = np.zeros((k, k))
    positions = np.arange(1, len(v_target) + 1, dtype=float)
    for i in range(1, k):
        lo_i, hi_i = bounds[i]
        fitted = fits[i].line(positions[lo_i:hi_i])
        base = v_target[lo_i:hi_i] - fitted
        for j in range(i):
            inc = increase_vector(L, bounds[i], bounds[j])
            w_ij = float(np.median(base + inc)) / n_r[j]
            w_sim[i, j] = w_sim[j, i] = w_ij
    return w_sim


@dataclass(frozen=True)
class CandidateFit:
    n_r: tuple[int, ...]
    w_sim: np.ndarray
    v_hat: np.ndarray
    residual: float
    feasible: bool
    k_cand: int


def evaluate_candidate(v: np.ndarray, L: np.ndarray, n_r: Sequence[int]) -> CandidateFit:
    """Fit one candidate size vector and assemble its model of v."""
    v = np.asarray(v, dtype=float)
    bounds = _block_bounds(n_r)
    k = len(bounds)
    v_target = target_v_for_candidate(L, n_r)
    positions = np.arange(1, len(v) + 1, dtype=float)

    fits = []
    for lo, hi in bounds:
        pts = np.column_stack([positions[lo:hi], v_target[lo:hi]])
        fits.append(fit_segment_plane(pts))
    w_sim = estimate_undesired(L, n_r, v_target, fits)
    for i in range(k):
        w_sim[i, i] = fits[i].slope

    v_hat = np.empty_like(v)
    for i, (lo, hi) in enumerate(bounds):
        shift = float(sum(n_r[j] * w_sim[i, j] for j in range(i)))
        v_hat[lo:hi] = w_sim[i, i] * np.arange(hi - lo) + shift

    # feasible = every cross coefficient sits below both adjacent within
    # coefficients (w_i > w_ij and w_j > w_ij for each pair); the margin
    # keeps strictness meaningful against estimation noise, since a false
    # split of one homogeneous block yields cross == within at population
    # level and would otherwise pass on a coin flip
    diag = np.diag(w_sim)
    feasible = all(
        w_sim[i, j] < FEASIBILITY_MARGIN * min(diag[i], diag[j])
        for i in range(k)
        for j in range(i + 1, k)
    )
    residual = float(np.linalg.norm(v - v_hat))
    return CandidateFit(
        n_r=tuple(int(x) for x in n_r),
        w_sim=w_sim,
        v_hat=v_hat,
        residual=residual,
        feasible=feasible,
        k_cand=k,
    )


def select_model(
    v: np.ndarray, L: np.ndarray, candidate_rows: Sequence[np.ndarray]
) -> VEstimate:
    """Pick the feasible candidate of least residual across every size vector.

    Feasible means every within-block coefficient strictly exceeds every
    cross-block one. When nothing is feasible the unconstrained minimizer is
    returned, flagged. Residual ties break toward fewer blocks, then the
    lexicographically smaller size vector.
    """
    fits: list[CandidateFit] = []
    for n_r in candidate_rows:
        if min(n_r) < 2:
            continue  # a singleton block has no line to fit
        try:
            fits.append(evaluate_candidate(v, L, n_r))
        except VerticalSegment:
            continue
    if not fits:
        raise NoCandidates("no candidate size vector could be fitted")

    def key(c: CandidateFit):
        return (c.residual, c.k_cand, c.n_r)

    feasible = [c for c in fits if c.feasible]
    pool = feasible if feasible else fits
    best = min(pool, key=key)
    return VEstimate(
        v=np.asarray(v, dtype=float),
        v_hat=best.v_hat,
        n_hat=best.n_r,
        w_sim=best.w_sim,
        residual=best.residual,
        k_cand=best.k_cand,
        feasible=bool(feasible),
    )
