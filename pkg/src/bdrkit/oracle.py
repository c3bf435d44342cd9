"""Synthetic block diagonal generators with closed-form spectral predictions.

A target matrix has K diagonal blocks, block i filled with a constant
coefficient w_i. Three corruption mechanisms are modeled: isolated
vertices (zero degree), a single extra vertex connected into every block,
and whole-block cross similarity. For each, the eigenvalue multiset and
the upper-triangular row-sum vector are known in closed form, so these
generators double as the property-test oracle for the rest of the package.

Eigenvalue predictions split into an explicit multiset plus the roots of
a scalar rational equation; the rational part is solved by sign-change
bracketing between its poles followed by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    InvalidSpec,
    PositionOutOfRange,
    UnsupportedCorruptionCombination,
)
from .matrix_core import EigenMode, SymmetricGraph

BISECT_TOL = 1e-12
POLE_MERGE_TOL = 1e-13


@dataclass(frozen=True)
class BlockSpec:
    """Block sizes n_i (each >= 2), coefficients w_i > 0, optional jitter half-width."""

    n: tuple[int, ...]
    w: tuple[float, ...]
    jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        object.__setattr__(self, "w", tuple(float(x) for x in self.w))
        if len(self.n) < 1 or len(self.n) != len(self.w):
            raise InvalidSpec("need matching, non-empty size and coefficient vectors")
        if any(ni < 2 for ni in self.n):
            raise InvalidSpec("every block needs at least 2 members")
        if any(wi <= 0 for wi in self.w):
            raise InvalidSpec("block coefficients must be positive")
        if self.jitter < 0:
            raise InvalidSpec("jitter must be nonnegative")

    @property
    def k(self) -> int:
        return len(self.n)

    @property
    def total(self) -> int:
        return int(sum(self.n))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """(lower, upper) 1-based inclusive index bounds of each block."""
        upper = np.cumsum(self.n)
        lower = upper - np.array(self.n) + 1
        return lower, upper


@dataclass(frozen=True)
class CorruptionSpec:
    """Corruption recipe applied on top of a target matrix.

    type1_count   isolated vertices appended after everything else
    type2         (position, per-block coefficients) pairs; the position is
                  the 1-based index the new vertex takes in the grown matrix
    group_sim     KxK symmetric matrix of cross-block coefficients, zero diag
    """

    type1_count: int = 0
    type2: tuple[tuple[int, tuple[float, ...]], ...] = ()
    group_sim: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "type2",
            tuple((int(p), tuple(float(c) for c in cs)) for p, cs in self.type2),
        )
        object.__setattr__(
            self, "group_sim", tuple(tuple(float(x) for x in row) for row in self.group_sim)
        )
        if self.type1_count < 0:
            raise InvalidSpec("type1_count must be nonnegative")

    def group_sim_array(self, k: int) -> np.ndarray:
        if not self.group_sim:
            return np.zeros((k, k))
        G = np.asarray(self.group_sim, dtype=float)
        if G.shape != (k, k):
            raise InvalidSpec(f"group_sim must be {k}x{k}")
        if np.any(np.abs(G - G.T) > 0) or np.any(np.diag(G) != 0):
            raise InvalidSpec("group_sim must be symmetric with zero diagonal")
        if np.any(G < 0):
            raise InvalidSpec("group_sim coefficients must be nonnegative")
        return G


@dataclass(frozen=True)
class SpectrumPrediction:
    """Closed-form eigenvalues plus the evaluator whose roots supply the rest."""

    explicit: np.ndarray
    residual_roots: np.ndarray
    residual_fn: Callable[[float], float] | None = None

    def full_multiset(self) -> np.ndarray:
        return np.sort(np.concatenate([self.explicit, self.residual_roots]))


@dataclass(frozen=True)
class CorruptedGraph:
    """Injection result with enough provenance to score recovery against."""

    graph: SymmetricGraph
    labels: np.ndarray  # block id 1..K per vertex, 0 for injected outliers
    type2_positions: tuple[int, ...]
    type1_indices: tuple[int, ...]


def gen_target_bd(spec: BlockSpec, seed: int = 0) -> SymmetricGraph:
    """Target matrix: block i filled with w_i (+- uniform jitter), zero elsewhere."""
    N = spec.total
    W = np.zeros((N, N))
    rng = np.random.default_rng(seed)
    lo = 0
    for ni, wi in zip(spec.n, spec.w):
        block = np.full((ni, ni), wi)
        if spec.jitter > 0:
            noise = rng.uniform(-spec.jitter, spec.jitter, size=(ni, ni))
            noise = np.triu(noise, k=1)
            block = block + noise + noise.T
        block = np.maximum(block, 0.0)
        W[lo : lo + ni, lo : lo + ni] = block
        lo += ni
    np.fill_diagonal(W, 0.0)
    return SymmetricGraph(W)


def inject_corruption(
    g: SymmetricGraph, spec: BlockSpec, c: CorruptionSpec, seed: int = 0
) -> CorruptedGraph:
    """Apply group similarity, insert connected outliers, append isolated ones.

    Insertion positions are interpreted sequentially: each type2 position
    refers to the matrix as grown so far (matching how the closed-form
    analysis shifts block boundaries after an insertion).
    """
    W = np.array(g.W)
    labels = np.repeat(np.arange(1, spec.k + 1), spec.n)
    if W.shape[0] != spec.total:
        raise InvalidSpec("graph size does not match block spec")

    G = c.group_sim_array(spec.k)
    if G.any():
        lower, upper = spec.bounds()
        for i in range(spec.k):
            for j in range(i + 1, spec.k):
                if G[i, j] > 0:
                    W[lower[i] - 1 : upper[i], lower[j] - 1 : upper[j]] = G[i, j]
                    W[lower[j] - 1 : upper[j], lower[i] - 1 : upper[i]] = G[i, j]

    type2_positions = []
    for pos, coeffs in c.type2:
        if len(coeffs) != spec.k:
            raise InvalidSpec("type2 coefficient vector must have one entry per block")
        n_cur = W.shape[0]
        if not 1 <= pos <= n_cur + 1:
            raise PositionOutOfRange(f"type2 position {pos} outside [1, {n_cur + 1}]")
        row = np.array([coeffs[labels[m] - 1] if labels[m] > 0 else 0.0 for m in range(n_cur)])
        W = np.insert(W, pos - 1, row, axis=0)
        row_full = np.insert(row, pos - 1, 0.0)
        W = np.insert(W, pos - 1, row_full, axis=1)
        labels = np.insert(labels, pos - 1, 0)
        type2_positions.append(pos)

    n_before = W.shape[0]
    if c.type1_count:
        grown = np.zeros((n_before + c.type1_count, n_before + c.type1_count))
        grown[:n_before, :n_before] = W
        W = grown
        labels = np.concatenate([labels, np.zeros(c.type1_count, dtype=labels.dtype)])
    type1_indices = tuple(range(n_before, n_before + c.type1_count))

    return CorruptedGraph(
        graph=SymmetricGraph(W),
        labels=labels,
        type2_positions=tuple(type2_positions),
        type1_indices=type1_indices,
    )


def predict_eigs_target(spec: BlockSpec) -> SpectrumPrediction:
    """Generalized-mode eigenvalues of the clean target: K zeros and N_i/(N_i-1)."""
    if spec.jitter != 0:
        raise InvalidSpec("closed-form prediction requires jitter = 0")
    vals = [0.0] * spec.k
    for ni in spec.n:
        vals.extend([ni / (ni - 1)] * (ni - 1))
    return SpectrumPrediction(
        explicit=np.array(vals), residual_roots=np.zeros(0), residual_fn=None
    )


def _bracket_roots(
    fn: Callable[[float], float], poles: Sequence[float], n_roots: int
) -> np.ndarray:
    """Roots of a rational fn that decreases from +inf to -inf between poles.

    fn tends to +inf just above each pole and to a negative constant at
    +inf, so there is exactly one root between consecutive distinct poles
    and one above the largest. Coincident poles are themselves roots of the
    cleared-denominator equation, one per extra multiplicity.
    """
    poles = np.sort(np.asarray(poles, dtype=float))
    merged: list[list[float]] = []
    for p in poles:
        if merged and abs(p - merged[-1][0]) <= POLE_MERGE_TOL * max(1.0, abs(p)):
            merged[-1][1] += 1
        else:
            merged.append([p, 1])
    roots = [p for p, mult in merged for _ in range(int(mult) - 1)]
    uniq = [p for p, _ in merged]

    def bisect(a: float, b: float) -> float:
        fa, fb = fn(a), fn(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if not (fa > 0 > fb):
            raise ArithmeticError(f"no sign change on bracket [{a}, {b}]")
        while b - a > BISECT_TOL:
            mid = 0.5 * (a + b)
            fm = fn(mid)
            if fm == 0.0:
                return mid
            if fm > 0:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    for lo, hi in zip(uniq[:-1], uniq[1:]):
        pad = 1e-12 * max(1.0, hi - lo)
        roots.append(bisect(lo + pad, hi - pad))
    top = uniq[-1]
    span = max(1.0, abs(top))
    hi = top + span
    while fn(hi) >= 0.0:
        span *= 2.0
        hi = top + span
    roots.append(bisect(top + 1e-12 * max(1.0, abs(top)), hi))
    if len(roots) != n_roots:
        raise ArithmeticError(f"expected {n_roots} residual roots, found {len(roots)}")
    return np.sort(np.asarray(roots))


def predict_eigs_type2(
    spec: BlockSpec, type2_coeffs: Sequence[float], mode: EigenMode
) -> SpectrumPrediction:
    """Spectrum after adding one vertex tied to every block.

    Generalized mode: N_i - 1 copies of (N_i w_i + c_i) / d_i with
    d_i = (N_i - 1) w_i + c_i, one zero, and K roots of

        -sum_i N_i c_i d_i / (c_i - lambda d_i) - d_out = 0,

    d_out = sum_i N_i c_i. Standard mode drops the degree weights: the
    explicit values are N_i w_i + c_i and the equation becomes
    -sum_i N_i c_i / (c_i - lambda) - 1 = 0.
    """
    if spec.jitter != 0:
        raise InvalidSpec("closed-form prediction requires jitter = 0")
    c = np.asarray(type2_coeffs, dtype=float)
    if c.shape != (spec.k,) or np.any(c <= 0):
        raise InvalidSpec("need one positive coefficient per block")
    n = np.asarray(spec.n, dtype=float)
    w = np.asarray(spec.w, dtype=float)
    d_out = float(np.sum(n * c))
    d = (n - 1) * w + c

    explicit = [0.0]
    if mode == "generalized":
        for i in range(spec.k):
            explicit.extend([(n[i] * w[i] + c[i]) / d[i]] * (int(n[i]) - 1))

        def fn(lam: float) -> float:
            return -d_out - float(np.sum(n * c * d / (c - lam * d)))

        poles = c / d
    elif mode == "standard":
        for i in range(spec.k):
            explicit.extend([n[i] * w[i] + c[i]] * (int(n[i]) - 1))

        def fn(lam: float) -> float:
            return -1.0 - float(np.sum(n * c / (c - lam)))

        poles = c
    else:
        raise ValueError(f"unknown eigen mode: {mode!r}")

    roots = _bracket_roots(fn, poles, spec.k)
    return SpectrumPrediction(
        explicit=np.array(explicit), residual_roots=roots, residual_fn=fn
    )


def predict_eigs_group(
    spec: BlockSpec, i: int, cross_coeffs: Sequence[float], mode: EigenMode
) -> SpectrumPrediction:
    """Spectrum when block i (0-based) shares coefficients with every other block.

    cross_coeffs[j] is the block-i/block-j coefficient; entry i is ignored.
    Generalized mode per-block degrees are d_i = (N_i - 1) w_i + sum_j N_j c_j
    and d_j = (N_j - 1) w_j + N_i c_j; the K - 1 residual roots solve

        -sum_{j != i} d_j N_j c_j / (N_i c_j - lambda d_j) - d_i = 0.
    """
    if spec.jitter != 0:
        raise InvalidSpec("closed-form prediction requires jitter = 0")
    k = spec.k
    if k < 2:
        raise InvalidSpec("group similarity needs at least two blocks")
    if not 0 <= i < k:
        raise InvalidSpec(f"block index {i} outside [0, {k})")
    c = np.asarray(cross_coeffs, dtype=float)
    if c.shape != (k,):
        raise InvalidSpec("need one coefficient per block")
    others = [j for j in range(k) if j != i]
    if np.any(c[others] <= 0):
        raise InvalidSpec("cross coefficients must be positive")
    n = np.asarray(spec.n, dtype=float)
    w = np.asarray(spec.w, dtype=float)

    d_i = (n[i] - 1) * w[i] + float(np.sum(n[others] * c[others]))
    d_j = {j: (n[j] - 1) * w[j] + n[i] * c[j] for j in others}

    explicit = [0.0]
    if mode == "generalized":
        explicit.extend(
            [(n[i] * w[i] + float(np.sum(n[others] * c[others]))) / d_i] * (int(n[i]) - 1)
        )
        for j in others:
            explicit.extend([(n[j] * w[j] + n[i] * c[j]) / d_j[j]] * (int(n[j]) - 1))

        def fn(lam: float) -> float:
            return -d_i - sum(
                d_j[j] * n[j] * c[j] / (n[i] * c[j] - lam * d_j[j]) for j in others
            )

        poles = [n[i] * c[j] / d_j[j] for j in others]
    elif mode == "standard":
        explicit.extend(
            [n[i] * w[i] + float(np.sum(n[others] * c[others]))] * (int(n[i]) - 1)
        )
        for j in others:
            explicit.extend([n[j] * w[j] + n[i] * c[j]] * (int(n[j]) - 1))

        def fn(lam: float) -> float:
            return -1.0 - sum(n[j] * c[j] / (n[i] * c[j] - lam) for j in others)

        poles = [n[i] * c[j] for j in others]
    else:
        raise ValueError(f"unknown eigen mode: {mode!r}")

    roots = _bracket_roots(fn, poles, k - 1)
    return SpectrumPrediction(
        explicit=np.array(explicit), residual_roots=roots, residual_fn=fn
    )


def predict_v(spec: BlockSpec, c: CorruptionSpec) -> np.ndarray:
    """Closed-form upper-triangular row-sum vector for a supported corruption.

    Supported recipes: a single connected outlier at any insertion position,
    or cross-block similarity (one block against all others, or every pair).
    The group-similarity form shifts the ramp of block i up by
    sum_{j < i} N_j c_{i,j}; the outlier form raises every later component
    of block j by c_j and fills the outlier's own component from the mass
    to its left.
    """
    if spec.jitter != 0:
        raise InvalidSpec("closed-form prediction requires jitter = 0")
    if c.type1_count:
        raise UnsupportedCorruptionCombination("type I vertices have no closed-form case here")

    has_type2 = len(c.type2) > 0
    G = c.group_sim_array(spec.k)
    if has_type2 and G.any():
        raise UnsupportedCorruptionCombination("combined outlier and group similarity")
    if len(c.type2) > 1:
        raise UnsupportedCorruptionCombination("more than one connected outlier")

    n = np.asarray(spec.n)
    w = np.asarray(spec.w, dtype=float)
    k = spec.k

    if not has_type2:
        # ramps shifted by the accumulated cross mass of earlier blocks
        pieces = []
        for i in range(k):
            shift = float(sum(n[j] * G[i, j] for j in range(i)))
            pieces.append(shift + w[i] * np.arange(n[i]))
        return np.concatenate(pieces)

    pos, coeffs = c.type2[0]
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (k,):
        raise InvalidSpec("type2 coefficient vector must have one entry per block")
    N = spec.total
    if not 1 <= pos <= N + 1:
        raise PositionOutOfRange(f"type2 position {pos} outside [1, {N + 1}]")

    v = np.zeros(N + 1)
    lower, _ = spec.bounds()
    # post-insertion 1-based position of each block member
    for i in range(k):
        for t in range(n[i]):
            original = lower[i] + t
            p = original + 1 if pos <= original else original
            v[p - 1] = t * w[i] + (coeffs[i] if p > pos else 0.0)
    # outlier component: full mass of blocks entirely left of it, partial
    # mass of the block it interrupts
    acc = 0.0
    for i in range(k):
        lo_post = lower[i] + 1 if pos <= lower[i] else lower[i]
        if lo_post >= pos:
            break
        members_before = min(pos - lo_post, n[i])
        if members_before == n[i]:
            acc += n[i] * coeffs[i]
        else:
            acc += members_before * coeffs[i]
            break
    v[pos - 1] = acc
    return v
