"""Command line front end.

    bdrkit --input data.csv --truth labels.csv --output result.json
    bdrkit gen --sizes 10,8,12 --weights 0.6,0.3,0.9 --out fixtures/target

Every failure mode exits with its own code and a one-line diagnostic;
BDRKIT_THREADS caps BLAS-level parallelism when set.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import errors
from .oracle import BlockSpec, CorruptionSpec
from .pipeline import RunConfig, gen_synthetic, run_pipeline

EXIT_CODES: dict[type, int] = {
    errors.NoSparseCandidate: 2,
    errors.ParseError: 3,
    errors.ZeroColumn: 4,
    errors.SingularDegree: 5,
    errors.AllOutliers: 6,
    errors.NoCandidates: 7,
    errors.NoFeasibleCandidate: 8,
    errors.InvalidSpec: 9,
    errors.PositionOutOfRange: 10,
    errors.VerticalSegment: 11,
    errors.LengthMismatch: 12,
    errors.EmptyGraph: 13,
}


def _exit_code(exc: errors.BdrError) -> int:
    for klass, code in EXIT_CODES.items():
        if isinstance(exc, klass):
            return code
    return 1


def _run_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdrkit", description=__doc__)
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=["data", "affinity"], default="data")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--transpose", action="store_true",
                   help="input has samples as columns instead of rows")
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--ncmax", type=int, default=None)
    p.add_argument("--nmin", type=int, default=None)
    p.add_argument("--eig", choices=["generalized", "standard"], default="generalized")
    p.add_argument("--sparsify", choices=["threshold", "pnn", "none"], default="pnn")
    p.add_argument("--lambda1-tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truth", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--trials", type=int, default=1,
                   help="repeat the run with seed, seed+1, ... and report p_det")
    return p


def _gen_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdrkit gen")
    p.add_argument("--sizes", required=True, help="comma list, e.g. 10,8,12")
    p.add_argument("--weights", required=True, help="comma list, e.g. 0.6,0.3,0.9")
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--type1", type=int, default=0)
    p.add_argument("--type2", action="append", default=[],
                   help="pos:w1,w2,... (1-based insertion position)")
    p.add_argument("--group", action="append", default=[],
                   help="i,j:w cross-block coefficient (1-based blocks)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    return p


def _parse_gen(args) -> tuple[BlockSpec, CorruptionSpec, int, str]:
    try:
        sizes = tuple(int(x) for x in args.sizes.split(","))
        weights = tuple(float(x) for x in args.weights.split(","))
    except ValueError as exc:
        raise errors.ParseError(f"bad sizes/weights: {exc}") from exc
    spec = BlockSpec(n=sizes, w=weights, jitter=args.jitter)
    type2 = []
    for item in args.type2:
        try:
            pos, coeffs = item.split(":")
            type2.append((int(pos), tuple(float(x) for x in coeffs.split(","))))
        except ValueError as exc:
            raise errors.ParseError(f"bad --type2 {item!r}: {exc}") from exc
    k = spec.k
    group = [[0.0] * k for _ in range(k)]
    for item in args.group:
        try:
            pair, w = item.split(":")
            i, j = (int(x) for x in pair.split(","))
            group[i - 1][j - 1] = group[j - 1][i - 1] = float(w)
        except (ValueError, IndexError) as exc:
            raise errors.ParseError(f"bad --group {item!r}: {exc}") from exc
    corruption = CorruptionSpec(
        type1_count=args.type1,
        type2=tuple(type2),
        group_sim=tuple(tuple(row) for row in group) if args.group else (),
    )
    return spec, corruption, args.seed, args.out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)

    limits = None
    threads = os.environ.get("BDRKIT_THREADS")
    if threads:
        try:
            from threadpoolctl import threadpool_limits

            limits = threadpool_limits(limits=int(threads))
        except (ImportError, ValueError):
            limits = None

    try:
        if argv and argv[0] == "gen":
            try:
                args = _gen_parser().parse_args(argv[1:])
            except SystemExit as exc:  # argparse usage error -> parse error code
                if exc.code in (0, None):
                    raise
                return 3
            spec, corruption, seed, out = _parse_gen(args)
            paths = gen_synthetic(spec, corruption, seed, out)
            print("\n".join(f"{k}: {v}" for k, v in paths.items()))
            return 0

        try:
            args = _run_parser().parse_args(argv)
        except SystemExit as exc:
            if exc.code in (0, None):
                raise
            return 3
        cfg = RunConfig(
            input=args.input,
            kind=args.kind,
            delimiter=args.delimiter,
            transpose=args.transpose,
            kmin=args.kmin,
            kmax=args.kmax,
            ncmax=args.ncmax,
            nmin=args.nmin,
            eig=args.eig,
            sparsify=args.sparsify,
            lambda1_tol=args.lambda1_tol,
            seed=args.seed,
            truth=args.truth,
            output=args.output,
        )
        if args.trials <= 1:
            result = run_pipeline(cfg)
            print(f"K_hat={result.k_hat} n_hat={list(result.n_hat)} "
                  f"residual={result.residual:.6g} feasible={result.feasible}")
            if "acc" in result.metrics:
                print(f"accuracy={result.metrics['acc']:.6f}")
            return 0

        k_hats = []
        for t in range(args.trials):
            cfg.seed = args.seed + t
            cfg.output = None if args.output is None else f"{args.output}.{t}"
            result = run_pipeline(cfg)
            k_hats.append(result.k_hat)
        print(f"K_hats={k_hats}")
        if cfg.truth:
            from .clustering import p_det
            from .pipeline import load_labels
            import numpy as np

            truth = load_labels(cfg.truth)
            k_true = len(np.unique(truth[truth != 0]))
            print(f"p_det={p_det(k_hats, k_true):.4f}")
        return 0
    except errors.BdrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    finally:
        if limits is not None:
            limits.unregister()


if __name__ == "__main__":
    sys.exit(main())
