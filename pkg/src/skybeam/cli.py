"""Command-line front end.

Subcommands:
  simulate  run one configuration and persist results
  compare   run every scheme on shared seeds
  sweep     vary fleet size and speed bound over a grid
  report    recompute summary metrics from stored result files
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from .errors import ConfigError, SkybeamError
from .simulate import (
    SCHEMES,
    SimConfig,
    load_config,
    run_monte_carlo,
    run_trials,
    summarize,
    summary_from_csv,
    write_results_csv,
)


def _base_config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    if args.out is not None:
        cfg.out_dir = args.out
    if getattr(args, "scheme", None) is not None:
        if args.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {args.scheme!r}")
        cfg.scheme = args.scheme
    return cfg


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_simulate(args) -> int:
    cfg = _base_config(args)
    summary = run_monte_carlo(cfg, workers=args.workers)
    print(f"scheme={cfg.scheme} trials={summary.trials} "
          f"accuracy={summary.accuracy_mean:.4f}+-{summary.accuracy_std:.4f} "
          f"mean_rate={summary.mean_rate:.3f} bit/s/Hz")
    return 0


def cmd_compare(args) -> int:
    cfg = _base_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    combined = {}
    for scheme in SCHEMES:
        run_cfg = dataclasses.replace(cfg, scheme=scheme)
        results = run_trials(run_cfg, workers=args.workers)
        write_results_csv(out / f"{scheme}_results.csv", results)
        summary = summarize(results)
        combined[scheme] = dataclasses.asdict(summary)
        print(f"{scheme:15s} accuracy={summary.accuracy_mean:.4f} "
              f"mean_rate={summary.mean_rate:.3f}")
    with open(out / "compare_summary.json", "w") as fh:
        json.dump(combined, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_sweep(args) -> int:
    cfg = _base_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schemes = ("dia", "location-isac", "velocity-isac")
    rows = []
    for k in args.k_grid:
        for v_max in args.speed_grid:
            for scheme in schemes:
                run_cfg = dataclasses.replace(cfg, scheme=scheme)
                run_cfg.fleet = dataclasses.replace(
                    cfg.fleet, k=k, v_max_mps=float(v_max)
                )
                summary = summarize(run_trials(run_cfg, workers=args.workers))
                rows.append((k, v_max, scheme,
                             summary.accuracy_mean, summary.accuracy_std))
                print(f"K={k} v_max={v_max} {scheme:15s} "
                      f"accuracy={summary.accuracy_mean:.4f}")
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("k", "v_max_mps", "scheme", "accuracy_mean", "accuracy_std"))
        for row in rows:
            writer.writerow(row)
    return 0


def cmd_report(args) -> int:
    in_dir = Path(args.results_dir)
    files = sorted(in_dir.glob("*_results.csv"))
    if not files:
        raise ConfigError(f"no *_results.csv files under {in_dir}")
    report = {f.name.removesuffix("_results.csv"): summary_from_csv(f) for f in files}
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    with open(in_dir / "report.json", "w") as fh:
        fh.write(text + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skybeam",
        description="Multi-UAV mmWave beam tracking and identity association simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_scheme=True):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--trials", type=int, help="Monte-Carlo trial count override")
        p.add_argument("--out", metavar="DIR", help="output directory override")
        p.add_argument("--workers", type=int, default=1, help="parallel trial workers")
        if with_scheme:
            p.add_argument("--scheme", choices=SCHEMES, help="scheme override")

    common(sub.add_parser("simulate", help="run one configuration"))
    common(sub.add_parser("compare", help="run all schemes on shared seeds"),
           with_scheme=False)
    p_sweep = sub.add_parser("sweep", help="vary K and the speed upper bound")
    common(p_sweep, with_scheme=False)
    p_sweep.add_argument("--k-grid", type=_int_list, default=[10, 15, 20],
                         help="comma-separated fleet sizes")
    p_sweep.add_argument("--speed-grid", type=_int_list, default=[10, 15, 20, 25, 30],
                         help="comma-separated speed upper bounds, m/s")
    p_report = sub.add_parser("report", help="recompute summaries from stored results")
    p_report.add_argument("results_dir", help="directory holding *_results.csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    handlers = {
        "simulate": cmd_simulate,
        "compare": cmd_compare,
        "sweep": cmd_sweep,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (SkybeamError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
