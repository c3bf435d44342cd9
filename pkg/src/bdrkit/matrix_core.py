"""Dense symmetric matrix primitives.

Affinity construction from a data matrix, Laplacian assembly, the
upper-triangular row-sum transform that turns a block diagonal Laplacian
into a piece-wise linear vector, and small dense eigensolvers in standard
and generalized (degree-weighted) form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg

from .errors import SingularDegree, ZeroColumn

EigenMode = Literal["standard", "generalized"]

SYMMETRY_TOL = 1e-12
ZERO_EIG_TOL = 1e-9
DEGREE_TOL = 1e-12


@dataclass(frozen=True)
class SymmetricGraph:
    """Affinity matrix W (zero diagonal), degree vector and Laplacian L = D - W."""

    W: np.ndarray
    degrees: np.ndarray = field(init=False)
    L: np.ndarray = field(init=False)

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError(f"affinity matrix must be square, got {W.shape}")
        if not np.all(np.isfinite(W)):
            raise ValueError("affinity matrix contains non-finite entries")
        if np.max(np.abs(W - W.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("affinity matrix is not symmetric within 1e-12")
        W = 0.5 * (W + W.T)  # kill fp-level asymmetry so L is exactly symmetric
        np.fill_diagonal(W, 0.0)
        W.setflags(write=False)
        d = W.sum(axis=1)
        L = np.diag(d) - W
        d.setflags(write=False)
        L.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "degrees", d)
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted ascending with column-aligned eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def normalize_columns(X: np.ndarray) -> np.ndarray:
    """Scale every column of X to unit Euclidean norm; zero columns are rejected."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("data matrix must be 2-D (features x samples)")
    if not np.all(np.isfinite(X)):
        raise ValueError("data matrix contains non-finite entries")
    norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(norms <= 0.0)
    if zero.size:
        raise ZeroColumn(int(zero[0]))
    return X / norms


def build_affinity(X: np.ndarray) -> SymmetricGraph:
    """Cosine-similarity graph: W = X^T X on unit-norm sample columns, zero diagonal."""
    Xn = normalize_columns(X)
    W = Xn.T @ Xn
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    return SymmetricGraph(W)


def vector_v(L: np.ndarray) -> np.ndarray:
    """Upper-triangular row sums of L including the diagonal.

    For a block diagonal Laplacian this is a piece-wise linear ramp, one
    linear piece per block, with slope equal to the block's similarity
    coefficient.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("Laplacian must be square")
    return np.triu(L).sum(axis=1)


def clamp_zero_eigenvalues(eigenvalues: np.ndarray, tol: float = ZERO_EIG_TOL) -> np.ndarray:
    """Snap eigenvalues within tol of zero to exactly zero (multiplicity counting)."""
    out = np.array(eigenvalues, dtype=float, copy=True)
    out[np.abs(out) < tol] = 0.0
    return out


def eig_smallest(g: SymmetricGraph, mode: EigenMode, k: int) -> Spectrum:
    """k smallest eigenpairs of L y = lambda y (standard) or L y = lambda D y.

    The generalized problem is reduced to a symmetric standard one on
    D^{-1/2} L D^{-1/2}; eigenvectors are mapped back so the returned pairs
    satisfy the original pencil.
    """
    n = g.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if mode == "standard":
        S = g.L
    elif mode == "generalized":
        bad = np.flatnonzero(g.degrees <= DEGREE_TOL)
        if bad.size:
            raise SingularDegree(int(bad[0]))
        inv_sqrt_d = 1.0 / np.sqrt(g.degrees)
        S = g.L * inv_sqrt_d[:, None] * inv_sqrt_d[None, :]
        S = 0.5 * (S + S.T)
    else:
        raise ValueError(f"unknown eigen mode: {mode!r}")

    if k < n:
        vals, vecs = scipy.linalg.eigh(S, subset_by_index=[0, k - 1])
    else:
        vals, vecs = scipy.linalg.eigh(S)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    if mode == "generalized":
        vecs = vecs * inv_sqrt_d[:, None]
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)
