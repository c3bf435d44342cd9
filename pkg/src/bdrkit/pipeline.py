"""End-to-end batch pipeline: ingest, enhance, estimate, cluster, report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import accuracy, conductance, modularity, reconstruct_bd, spectral_cluster
from .enhance import SparsifyConfig, SparsifyMethod, apply_order, detect_type1, sbdo_order, sparsify
from .errors import NoCandidates, NoFeasibleCandidate, ParseError
from .matrix_core import EigenMode, SymmetricGraph, build_affinity, vector_v
from .oracle import BlockSpec, CorruptionSpec, gen_target_bd, inject_corruption
from .vfit import VEstimate, candidate_sizes, detect_changepoints, select_model


@dataclass
class RunConfig:
    input: str
    kind: str = "data"  # "data" | "affinity"
    delimiter: str = ","
    transpose: bool = False
    kmin: int = 2
    kmax: int | None = None  # 2K when truth known, else 10
    ncmax: int | None = None  # 2 (kmax - 1)
    nmin: int | None = None  # ceil(N / kmax) after outlier removal
    eig: EigenMode = "generalized"
    sparsify: SparsifyMethod = "pnn"
    t_ini: float = 0.5
    t_inc: float = 1e-3
    lambda1_tol: float = 1e-3
    seed: int = 0
    truth: str | None = None
    output: str | None = None

    def echo(self) -> dict:
        return {
            "input": self.input,
            "kind": self.kind,
            "delimiter": self.delimiter,
            "transpose": self.transpose,
            "kmin": self.kmin,
            "kmax": self.kmax,
            "ncmax": self.ncmax,
            "nmin": self.nmin,
            "eig": self.eig,
            "sparsify": self.sparsify,
            "t_ini": self.t_ini,
            "t_inc": self.t_inc,
            "lambda1_tol": self.lambda1_tol,
            "seed": self.seed,
            "truth": self.truth,
            "output": self.output,
        }


@dataclass
class PipelineResult:
    config: dict
    type1_indices: tuple[int, ...]
    ordering: tuple[int, ...]  # position in BD order -> original sample index
    k_hat: int
    n_hat: tuple[int, ...]
    w_sim: np.ndarray
    feasible: bool
    labels: np.ndarray
    residual: float
    gamma_used: float
    tau: tuple[int, ...]
    v: np.ndarray
    v_hat: np.ndarray
    metrics: dict = field(default_factory=dict)
    sparsify_used: dict = field(default_factory=dict)

    def document(self) -> dict:
        return {
            "config": self.config,
            "type1_indices": list(self.type1_indices),
            "ordering": list(self.ordering),
            "K_hat": self.k_hat,
            "n_hat": list(self.n_hat),
            "W_sim": self.w_sim.tolist(),
            "feasible": self.feasible,
            "labels": self.labels.tolist(),
            "residual": self.residual,
            "gamma_used": self.gamma_used,
            "tau": list(self.tau),
            "metrics": self.metrics,
            "sparsify_used": self.sparsify_used,
            "v": self.v.tolist(),
            "v_hat": self.v_hat.tolist(),
        }


def _fmt(value) -> str:
    """JSON with every float at 17 significant digits, reproducibly ordered."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def render_document(doc: dict) -> str:
    return _fmt(doc) + "\n"


def load_matrix(path: str, delimiter: str = ",") -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=delimiter, ndmin=2)
    except Exception as exc:
        raise ParseError(f"cannot parse {path}: {exc}") from exc
    return arr


def load_labels(path: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",")
    except Exception as exc:
        raise ParseError(f"cannot parse labels {path}: {exc}") from exc
    return np.asarray(arr, dtype=int).reshape(-1)


def graph_from_input(cfg: RunConfig) -> SymmetricGraph:
    arr = load_matrix(cfg.input, cfg.delimiter)
    if cfg.kind == "affinity":
        if arr.shape[0] != arr.shape[1]:
            raise ParseError("affinity input must be square")
        return SymmetricGraph(arr)
    if cfg.kind == "data":
        X = arr if cfg.transpose else arr.T  # columns are samples
        return build_affinity(X)
    raise ParseError(f"unknown input kind {cfg.kind!r}")


def estimate_block_labels(n_hat) -> np.ndarray:
    return np.repeat(np.arange(1, len(n_hat) + 1), n_hat)


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    g0 = graph_from_input(cfg)
    n_total = g0.n

    truth = load_labels(cfg.truth) if cfg.truth else None
    if truth is not None and len(truth) != n_total:
        raise ParseError("truth labels do not match the sample count")

    kmax = cfg.kmax
    if kmax is None:
        kmax = 2 * len(np.unique(truth[truth != 0])) if truth is not None else 10
    kmin = cfg.kmin
    if not 2 <= kmin <= kmax:
        raise ParseError(f"need 2 <= kmin <= kmax, got [{kmin}, {kmax}]")
    if n_total < 2 * kmin:
        raise ParseError(f"need at least {2 * kmin} samples for kmin={kmin}, got {n_total}")
    ncmax = cfg.ncmax if cfg.ncmax is not None else 2 * (kmax - 1)
    if ncmax < kmax - 1:
        raise ParseError("ncmax must be at least kmax - 1")

    report, reduced = detect_type1(g0)
    order = sbdo_order(reduced)
    ordered = apply_order(reduced, order)

    nmin = cfg.nmin if cfg.nmin is not None else math.ceil(ordered.n / kmax)
    sp_cfg = SparsifyConfig(
        method=cfg.sparsify,
        t_ini=cfg.t_ini,
        t_inc=cfg.t_inc,
        n_min=nmin,
        lambda1_tol=cfg.lambda1_tol,
        mode=cfg.eig,
    )
    sparse, sp_info = sparsify(ordered, sp_cfg)

    v = vector_v(sparse.L)
    cp = detect_changepoints(v, ncmax)

    rows = []
    for k_cand in range(kmin, kmax + 1):
        try:
            rows.extend(candidate_sizes(cp, k_cand, nmin, ordered.n))
        except NoFeasibleCandidate:
            continue
    if not rows:
        raise NoCandidates(
            f"no candidate block sizes from {cp.n_c} changepoints with nmin={nmin}"
        )
    estimate: VEstimate = select_model(v, sparse.L, rows)

    w_bd = reconstruct_bd(ordered.W, estimate.n_hat)
    labels = spectral_cluster(
        w_bd,
        len(estimate.n_hat),
        seed=cfg.seed,
        mode=cfg.eig,
        order=order,
        report=report,
        n_total=n_total,
    )

    metrics: dict = {}
    labels_ordered = estimate_block_labels(estimate.n_hat)
    metrics["mod_original"] = modularity(g0.W, labels)
    metrics["cond_original"] = conductance(g0.W, labels)
    metrics["mod_bd"] = modularity(w_bd, labels_ordered)
    metrics["cond_bd"] = conductance(w_bd, labels_ordered)
    if truth is not None:
        metrics["acc"] = accuracy(labels, truth)

    original_order = tuple(int(report.kept_indices[i]) for i in order)
    result = PipelineResult(
        config=cfg.echo(),
        type1_indices=report.outlier_indices,
        ordering=original_order,
        k_hat=len(estimate.n_hat),
        n_hat=estimate.n_hat,
        w_sim=estimate.w_sim,
        feasible=estimate.feasible,
        labels=np.asarray(labels),
        residual=estimate.residual,
        gamma_used=cp.gamma_used,
        tau=cp.tau,
        v=v,
        v_hat=estimate.v_hat,
        metrics=metrics,
        sparsify_used={
            "method": sp_info.method,
            "accepted": sp_info.accepted,
            "threshold": sp_info.threshold,
            "p": sp_info.p,
        },
    )
    if cfg.output:
        Path(cfg.output).write_text(render_document(result.document()))
    return result


def gen_synthetic(
    spec: BlockSpec,
    corruption: CorruptionSpec,
    seed: int,
    out_prefix: str,
) -> dict[str, str]:
    """Write an affinity CSV, truth labels and a JSON sidecar for the draw."""
    target = gen_target_bd(spec, seed=seed)
    injected = inject_corruption(target, spec, corruption, seed=seed)
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {
        "affinity": str(prefix) + "_affinity.csv",
        "labels": str(prefix) + "_labels.csv",
        "spec": str(prefix) + "_spec.json",
    }
    np.savetxt(paths["affinity"], injected.graph.W, delimiter=",", fmt="%.17g")
    np.savetxt(paths["labels"], injected.labels[None, :], delimiter=",", fmt="%d")
    sidecar = {
        "sizes": list(spec.n),
        "weights": list(spec.w),
        "jitter": spec.jitter,
        "seed": seed,
        "type1_count": corruption.type1_count,
        "type2": [[pos, list(coeffs)] for pos, coeffs in corruption.type2],
        "group_sim": [list(row) for row in corruption.group_sim],
    }
    Path(paths["spec"]).write_text(render_document(sidecar))
    return paths
