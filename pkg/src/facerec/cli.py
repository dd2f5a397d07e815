"""Batch command line: single runs, benchmark grids, constancy dumps.

    facerec run --config exp.cfg --db data/orl --metric mahalanobis --out run.csv
    facerec grid --configs grid.cfg --out grid.csv
    facerec constancy --config exp.cfg --out constancy.csv

Config files are flat key=value text (one key per line, # comments allowed);
a grid file holds several such blocks separated by blank lines. The database
value "synthetic" selects the built-in bump-surface benchmark.
"""
from __future__ import annotations

import argparse
import dataclasses
import re
import sys
from pathlib import Path

from .pipeline import (ExperimentConfig, StageError, emit_constancy,
                       parse_grid_configs, report_csv, run_experiment,
                       run_grid, write_grid_csv)

_ALGO_NAMES = {"coif": "coif-packet", "radon": "radon-dft",
               "coif-packet": "coif-packet", "radon-dft": "radon-dft"}


def canonical_family(name: str) -> str:
    """Accept coif2 / db4 shorthands alongside coiflet-2 / daubechies-4."""
    m = re.fullmatch(r"coif(\d+)", name)
    if m:
        return f"coiflet-{m.group(1)}"
    m = re.fullmatch(r"db(\d+)", name)
    if m:
        return f"daubechies-{m.group(1)}"
    return name


def _add_override_flags(parser: argparse.ArgumentParser,
                        with_out: bool = True) -> None:
    parser.add_argument("--db", help="database directory, or 'synthetic'")
    parser.add_argument("--algo", choices=sorted(_ALGO_NAMES),
                        help="coif (wavelet packets) or radon (Radon/DFT)")
    parser.add_argument("--family", help="wavelet family, e.g. coif2 or db4")
    parser.add_argument("--levels", type=int, help="packet decomposition depth")
    parser.add_argument("--train-per-class", type=int, dest="train_per_class")
    parser.add_argument("--metric", choices=["l1", "mahalanobis"])
    parser.add_argument("--mu-scale", type=float, dest="mu_scale")
    parser.add_argument("--k", type=int)
    parser.add_argument("--seed", type=int)
    if with_out:
        parser.add_argument("--out", help="CSV output path")


def _load_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_text(Path(args.config).read_text())
    else:
        cfg = ExperimentConfig()
    overrides = {}
    mapping = {"db": "database", "levels": "levels", "metric": "metric",
               "mu_scale": "mu_scale", "k": "k", "seed": "seed", "out": "out",
               "train_per_class": "n_train"}
    for flag, key in mapping.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "algo", None) is not None:
        overrides["algorithm"] = _ALGO_NAMES[args.algo]
    if getattr(args, "family", None) is not None:
        overrides["family"] = canonical_family(args.family)
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    report = run_experiment(cfg)
    print(f"{cfg.database} {cfg.algorithm} {cfg.metric} "
          f"n_train={cfg.n_train}: {report.recognition_percent:.1f}% "
          f"({len(report.records)} test images, "
          f"{report.duration_ms / 1000.0:.1f}s)")
    if cfg.out:
        Path(cfg.out).write_text(report_csv(report), encoding="utf-8")
        print(f"wrote {cfg.out}")
    return 0


def _cmd_grid(args) -> int:
    configs = parse_grid_configs(Path(args.configs).read_text())
    if args.out:
        rows = run_grid(configs, args.out)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        from .pipeline import grid_rows
        rows = grid_rows(configs)
        for row in rows:
            line = ",".join(row[c] for c in
                            ("database", "algorithm", "family", "n_train",
                             "metric", "recognition_percent", "duration_ms"))
            print(line + (f",{row['error']}" if row["error"] else ""))
    failures = [r for r in rows if r["error"]]
    for r in failures:
        print(f"error: {r['database']}/{r['algorithm']}: {r['error']}",
              file=sys.stderr)
    return 1 if failures else 0


def _cmd_constancy(args) -> int:
    cfg = _load_config(args)
    report = run_experiment(cfg)
    emit_constancy(report, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facerec",
        description="Depth-based face recognition benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--config", help="key=value config file")
    _add_override_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_grid = sub.add_parser("grid", help="run a grid of experiments")
    p_grid.add_argument("--configs", required=True,
                        help="file of blank-line separated config blocks")
    p_grid.add_argument("--out", help="CSV output path")
    p_grid.set_defaults(func=_cmd_grid)

    p_con = sub.add_parser("constancy",
                           help="dump per-class training constancy CSV")
    p_con.add_argument("--config", help="key=value config file")
    p_con.add_argument("--out", required=True, help="CSV output path")
    _add_override_flags(p_con, with_out=False)
    p_con.set_defaults(func=_cmd_constancy)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
