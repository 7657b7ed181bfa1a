"""Batch command-line front end.

Subcommands: kernel (one pair), gram (dataset Gram matrix, optionally through
a Nystrom approximation), test2 (two-sample permutation test), sweep (per-
config MMD over a hyperparameter grid).  Exit codes: 0 success, 2 config
error, 3 data error, 4 numerical guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import KernelConfig, RunConfig, canonical_json, load_grid, load_run_config
from .errors import ConfigError, DataError, NumericalGuardError
from .gram import (
    GramMatrix,
    gram,
    kernel_levels,
    kernel_value,
    nystrom,
    reconstruct,
    save_gram_binary,
    save_gram_csv,
)
from .io import load_dataset
from .mmd import SampleSet, permutation_test, sup_mmd
from .normalization import normalization_root
from .preprocess import apply_pipeline
from .sequences import Dataset, Sequence

__all__ = ["main"]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config file (sections [kernel]/[preprocess]/[run])")
    k = p.add_argument_group("kernel")
    k.add_argument("--family", choices=("linear", "rbf", "exponential"))
    k.add_argument("--bandwidth", type=float)
    k.add_argument("--scale", type=float)
    k.add_argument("--method", choices=("dp", "pde"))
    k.add_argument("--level", type=int, help="truncation level (dp)")
    k.add_argument("--dyadic-order", type=int, dest="dyadic_order")
    k.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None)
    k.add_argument("--norm-C", type=float, dest="norm_C")
    k.add_argument("--norm-alpha", type=float, dest="norm_alpha")
    k.add_argument("--level-weights", dest="level_weights", help="comma-separated, e.g. 1,1,0.5")
    pp = p.add_argument_group("preprocess")
    pp.add_argument("--subsample", type=int)
    pp.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None)
    pp.add_argument("--lead-lag", action=argparse.BooleanOptionalAction, default=None, dest="lead_lag")
    pp.add_argument("--add-time", type=float, dest="add_time")
    r = p.add_argument_group("run")
    r.add_argument("--workers", type=int)
    r.add_argument("--seed", type=int)


def _parse_weights(raw: str | None):
    if raw is None:
        return None
    try:
        return [float(v) for v in raw.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse level weights {raw!r}") from None


def _run_config(args) -> RunConfig:
    overrides = {
        "kernel": {
            "family": args.family,
            "bandwidth": args.bandwidth,
            "scale": args.scale,
            "method": args.method,
            "level": args.level,
            "dyadic_order": args.dyadic_order,
            "normalize": args.normalize,
            "norm_C": args.norm_C,
            "norm_alpha": args.norm_alpha,
            "level_weights": _parse_weights(args.level_weights),
        },
        "preprocess": {
            "subsample": args.subsample,
            "standardize": args.standardize,
            "lead_lag": args.lead_lag,
            "add_time": args.add_time,
        },
        "run": {"workers": args.workers, "seed": args.seed},
    }
    return load_run_config(args.config, overrides)


def _load_preprocessed(path: str, run: RunConfig) -> Dataset:
    return apply_pipeline(load_dataset(path), run.preprocess)


def _single_sequence(path: str, run: RunConfig) -> Sequence:
    ds = _load_preprocessed(path, run)
    if len(ds) != 1:
        raise DataError(f"{path}: expected exactly one sequence, found {len(ds)}")
    return ds.sequences[0]


def _write_json(path: str | None, report: dict) -> None:
    if path:
        Path(path).write_text(
            json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
            newline="\n",
        )


def _cmd_kernel(args) -> int:
    run = _run_config(args)
    cfg = run.kernel
    x = _single_sequence(args.x, run)
    y = _single_sequence(args.y, run)
    value = kernel_value(x, y, cfg)
    report = {
        "config": run.to_dict(),
        "fingerprint": cfg.fingerprint(),
        "method": cfg.method,
        "value": value,
    }
    if cfg.method == "dp":
        levels = kernel_levels(x, y, cfg).values
        if cfg.normalize:
            params = cfg.norm_params()
            tx = normalization_root(kernel_levels(x, x, cfg), params)
            ty = normalization_root(kernel_levels(y, y, cfg), params)
            levels = levels * (tx * ty) ** np.arange(cfg.level + 1)
        report["levels"] = [float(v) for v in levels]
    print(repr(float(value)))
    _write_json(args.json, report)
    return 0


def _save_gram(path: str, matrix: GramMatrix) -> None:
    suffix = Path(path).suffix
    if suffix == ".csv":
        save_gram_csv(path, matrix)
    elif suffix == ".bin":
        save_gram_binary(path, matrix)
    else:
        raise ConfigError(f"gram output must end in .csv or .bin, got {path!r}")


def _cmd_gram(args) -> int:
    run = _run_config(args)
    cfg = run.kernel
    ds = _load_preprocessed(args.data, run)
    report = {"config": run.to_dict(), "fingerprint": cfg.fingerprint(), "n": len(ds)}
    if args.nystrom_rank is not None:
        factor = nystrom(ds, cfg, args.nystrom_rank, seed=run.seed, workers=run.workers)
        matrix = GramMatrix(reconstruct(factor), ds.ids, cfg.to_dict())
        report["nystrom"] = {"rank": factor.rank, "landmarks": list(factor.landmarks)}
    else:
        matrix = gram(ds, cfg, workers=run.workers)
    _save_gram(args.out, matrix)
    _write_json(args.json, report)
    print(f"wrote {matrix.n}x{matrix.n} gram to {args.out}")
    return 0


def _cmd_test2(args) -> int:
    run = _run_config(args)
    X = SampleSet(_load_preprocessed(args.x, run).sequences, label="x")
    Y = SampleSet(_load_preprocessed(args.y, run).sequences, label="y")
    grid = load_grid(args.grid, run.kernel) if args.grid else None
    result = permutation_test(
        X,
        Y,
        run.kernel,
        permutations=args.permutations,
        alpha=args.alpha,
        seed=run.seed,
        grid=grid,
        workers=run.workers,
    )
    report = {"config": run.to_dict(), "result": result.to_dict()}
    if grid:
        report["grid"] = [c.to_dict() for c in grid]
    print(canonical_json(report))
    _write_json(args.json, report)
    return 0


def _cmd_sweep(args) -> int:
    run = _run_config(args)
    X = SampleSet(_load_preprocessed(args.x, run).sequences, label="x")
    Y = SampleSet(_load_preprocessed(args.y, run).sequences, label="y")
    grid = load_grid(args.grid, run.kernel)
    lines = []
    for cfg in grid:
        stat, _ = sup_mmd(X, Y, [cfg], workers=run.workers)
        lines.append(
            canonical_json({"config": cfg.to_dict(), "fingerprint": cfg.fingerprint(), "mmd2": stat})
        )
    out = "\n".join(lines) + "\n"
    sys.stdout.write(out)
    if args.json:
        Path(args.json).write_text(out, encoding="utf-8", newline="\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigkern", description="Signature kernels, Gram matrices, and two-sample tests."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="evaluate one kernel value for a pair of sequences")
    p.add_argument("--x", required=True, help="dataset holding exactly one sequence")
    p.add_argument("--y", required=True, help="dataset holding exactly one sequence")
    p.add_argument("--json", help="write a JSON report here")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_kernel)

    p = sub.add_parser("gram", help="compute a dataset Gram matrix")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help=".csv or .bin output path")
    p.add_argument("--nystrom-rank", type=int, dest="nystrom_rank")
    p.add_argument("--json", help="write a JSON report here")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_gram)

    p = sub.add_parser("test2", help="two-sample permutation test")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--permutations", "-B", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid", help="JSONL grid of kernel-config overlays (sup statistic)")
    p.add_argument("--json", help="write a JSON report here")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_test2)

    p = sub.add_parser("sweep", help="per-config MMD over a hyperparameter grid")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--json", help="write the JSONL report here")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalGuardError as exc:
        print(f"guard tripped: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
