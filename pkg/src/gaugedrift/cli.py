"""Command-line front end: run seeded ensembles to CSV, compare runs.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, effective_dict, experiment_from_dict, load_config_file, merge_overrides
from .engine import GrowthFitError, fit_growth, run_ensemble

STEPS_HEADER = [
    "step",
    "mean_survival",
    "se_survival",
    "mean_unphys_weight",
    "se_unphys_weight",
    "zeno_fail_rate",
]
SUMMARY_HEADER = [
    "mode",
    "quantity",
    "status",
    "n_points",
    "slope",
    "intercept",
    "residual",
    "window_start",
    "window_end",
]


def _fmt(x) -> str:
    """Shortest decimal that round-trips the float exactly."""
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_run_outputs(out_dir: Path, stats, config_snapshot: dict, threads: int, duration: float) -> None:
    rows = []
    for i, step in enumerate(stats.steps):
        rows.append(
            [
                str(int(step)),
                _fmt(stats.mean_survival[i]),
                _fmt(stats.se_survival[i]),
                _fmt(stats.mean_unphys_weight[i]),
                _fmt(stats.se_unphys_weight[i]),
                _fmt(stats.zeno_fail_rate[i]),
            ]
        )
    _write_csv(out_dir / "steps.csv", STEPS_HEADER, rows)

    try:
        fit = fit_growth(stats)
        summary_row = [
            stats.mode,
            "unphysical_weight",
            "ok",
            str(fit.n_points),
            _fmt(fit.slope),
            _fmt(fit.intercept),
            _fmt(fit.residual),
            str(fit.window_steps[0]),
            str(fit.window_steps[1]),
        ]
    except GrowthFitError:
        summary_row = [stats.mode, "unphysical_weight", "too-few-points", "0"] + ["nan"] * 5
    _write_csv(out_dir / "summary.csv", SUMMARY_HEADER, [summary_row])

    manifest = {
        "tool": "gaugedrift",
        "version": __version__,
        "master_seed": config_snapshot["seed"],
        "threads": threads,
        "duration_seconds": duration,
        "outputs": {"steps": "steps.csv", "summary": "summary.csv"},
        "config": config_snapshot,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _cmd_run(args) -> int:
    data = load_config_file(args.config)
    overrides = list(args.override or [])
    if args.trajectories is not None:
        overrides.append(f"trajectories={args.trajectories}")
    data = merge_overrides(data, overrides)
    snapshot = effective_dict(data)
    cfg = experiment_from_dict(data)

    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    stats = run_ensemble(cfg, threads=args.threads)
    duration = time.perf_counter() - start
    _write_run_outputs(out_dir, stats, snapshot, args.threads, duration)
    print(f"wrote {out_dir / 'steps.csv'}, {out_dir / 'summary.csv'}, {out_dir / 'manifest.json'}")
    print(
        f"mode={cfg.mode} trajectories={cfg.trajectories} steps={cfg.steps} "
        f"final mean survival={_fmt(stats.mean_survival[-1])}"
    )
    return 0


def _read_steps_csv(run_dir: Path) -> list[dict]:
    path = run_dir / "steps.csv"
    if not path.is_file():
        raise FileNotFoundError(f"no steps.csv in {run_dir}")
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _cmd_compare(args) -> int:
    rows_a = _read_steps_csv(Path(args.run_a))
    rows_b = _read_steps_csv(Path(args.run_b))
    if len(rows_a) != len(rows_b):
        raise ValueError(
            f"step counts differ: {len(rows_a)} rows in {args.run_a}, {len(rows_b)} in {args.run_b}"
        )
    header = [
        "step",
        "mean_survival_a",
        "mean_survival_b",
        "survival_diff",
        "mean_unphys_weight_a",
        "mean_unphys_weight_b",
        "weight_diff",
    ]
    merged = []
    for ra, rb in zip(rows_a, rows_b):
        sa, sb = float(ra["mean_survival"]), float(rb["mean_survival"])
        wa, wb = float(ra["mean_unphys_weight"]), float(rb["mean_unphys_weight"])
        merged.append([ra["step"], _fmt(sa), _fmt(sb), _fmt(sa - sb), _fmt(wa), _fmt(wb), _fmt(wa - wb)])
    _write_csv(Path(args.output), header, merged)

    final_a = float(rows_a[-1]["mean_survival"])
    final_b = float(rows_b[-1]["mean_survival"])
    if final_a > final_b:
        verdict = f"higher final survival: {args.run_a} ({final_a!r} vs {final_b!r})"
    elif final_b > final_a:
        verdict = f"higher final survival: {args.run_b} ({final_b!r} vs {final_a!r})"
    else:
        verdict = f"equal final survival ({final_a!r})"
    print(f"wrote {args.output}")
    print(f"verdict: {verdict}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaugedrift",
        description="State-vector gauge-drift experiments on finite-group lattice models.",
    )
    parser.add_argument("--version", action="version", version=f"gaugedrift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one configured ensemble and write CSV outputs")
    run.add_argument("--config", required=True, help="TOML config or manifest.json of a previous run")
    run.add_argument("--output", required=True, help="output directory")
    run.add_argument(
        "--override",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (dotted keys reach tables, e.g. drift.amplitude=0.02)",
    )
    run.add_argument("--trajectories", type=int, default=None, help="shorthand for trajectories=N")
    run.add_argument("--threads", type=int, default=1, help="worker threads for trajectories")
    run.set_defaults(func=_cmd_run)

    cmp_ = sub.add_parser("compare", help="merge two runs' steps.csv and report the final-step verdict")
    cmp_.add_argument("run_a", help="directory of the first run")
    cmp_.add_argument("run_b", help="directory of the second run")
    cmp_.add_argument("--output", default="compare.csv", help="merged CSV path")
    cmp_.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # dimension caps, solver failures, IO problems
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
