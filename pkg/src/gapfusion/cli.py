"""Command-line entry points.

Subcommands:

* ``simulate-random``      scattered-missingness model comparison
* ``simulate-structural``  contiguous-gap model comparison
* ``fill``                 fill gaps in a real HF series using an LF series
* ``cluster``              size-constrained station clustering
* ``report-gaps``          gap detection/classification for one series

Every run writes CSV outputs plus a ``manifest.json`` echoing the
configuration, seeds, and package version, so results are reproducible
from the manifest alone. Exit code 1 signals a configuration or hard
numerical failure; argparse usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from ._version import __version__
from .clustering import (
    cluster_report,
    constrained_kmeans,
    load_stations,
    write_cluster_report,
    write_clustering,
)
from .errors import GapFusionError
from .experiments import run_random_experiment, run_structural_experiment
from .gp import FitConfig
from .mfgp import NestedDesign
from .pipelines import (
    bcmf_fill,
    gp_fill,
    mfgp_fill,
    simple_impute,
    wgp_fill,
    wmfgp_fill,
)
from .simulate import default_scenario, load_scenario
from .timeseries import (
    detect_and_classify_gaps,
    hourly_aggregate,
    load_series_csv,
    write_rejects_csv,
)

FULL_SCALE_RANDOM_REPS = 200
FULL_SCALE_STRUCTURAL_REPS = 500
DEFAULT_WINDOW = 336  # hours of context on each side of a gap
FILL_MODELS = ("gp", "wgp", "mfgp", "bcmf", "wmfgp", "si")
WARP_MIN = 30


def _write_manifest(out_dir, payload: dict) -> None:
    payload = dict(payload, version=__version__)
    with open(
        os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n"
    ) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _scenario_from_args(args, default_reps: int):
    if args.config:
        scenario = load_scenario(args.config)
    else:
        scenario = default_scenario("weibull", "high", reps=default_reps)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.reps is not None:
        overrides["reps"] = args.reps
    elif args.full_scale:
        overrides["reps"] = (
            FULL_SCALE_RANDOM_REPS
            if args.command == "simulate-random"
            else FULL_SCALE_STRUCTURAL_REPS
        )
    return replace(scenario, **overrides) if overrides else scenario


def _print_summary(report) -> None:
    for row in report.summary:
        label = row["model"]
        if "gap_length" in row:
            label = f"gap {row['gap_length']:>3}h {label}"
        med = row["median_mae"]
        med_s = f"{med:.4f}" if med is not None else "n/a"
        print(
            f"{label:>16}: median MAE {med_s}  "
            f"(ok {row['n_ok']}, failed {row['n_failed']})"
        )


def _cmd_simulate_random(args) -> int:
    scenario = _scenario_from_args(args, default_reps=50)
    report = run_random_experiment(scenario, workers=args.workers)
    report.write(args.out)
    _print_summary(report)
    print(f"wrote {args.out}/report.csv, summary.csv, manifest.json")
    return 0


def _cmd_simulate_structural(args) -> int:
    scenario = _scenario_from_args(args, default_reps=50)
    gap_lengths = tuple(int(g) for g in args.gap_lengths.split(","))
    report = run_structural_experiment(
        scenario, gap_lengths=gap_lengths, workers=args.workers
    )
    report.write(args.out)
    _print_summary(report)
    print(f"wrote {args.out}/report.csv, summary.csv, manifest.json")
    return 0


def _fill_one(model: str, x_lo, y_lo, x_hi, y_hi, query, config):
    if model == "si":
        return simple_impute(x_hi, y_hi, query)
    if model == "gp":
        return gp_fill(x_hi, y_hi, query, config)
    if model == "wgp":
        return wgp_fill(x_hi, y_hi, query, config)
    design = NestedDesign(x_lo, y_lo, x_hi, y_hi)
    if model == "mfgp":
        return mfgp_fill(design, query, config)
    if model == "bcmf":
        return bcmf_fill(design, query, config)
    return wmfgp_fill(design, query, config)


def _cmd_fill(args) -> int:
    hf_raw, hf_rejects = load_series_csv(args.hf)
    lf_raw, lf_rejects = load_series_csv(args.lf)
    hf = hourly_aggregate(hf_raw)
    lf = hourly_aggregate(lf_raw)
    os.makedirs(args.out, exist_ok=True)
    if hf_rejects:
        write_rejects_csv(os.path.join(args.out, "hf_rejects.csv"), hf_rejects)
    if lf_rejects:
        write_rejects_csv(os.path.join(args.out, "lf_rejects.csv"), lf_rejects)

    report = detect_and_classify_gaps(hf)
    origin = hf.timestamps[0]
    x_hf = hf.hours_since_start()
    x_lf = (lf.timestamps - origin).astype("timedelta64[s]").astype(float) / 3600.0
    config = FitConfig(seed=args.seed or 0)

    filled_lines = ["timestamp,mean,lower,upper,model"]
    skipped_lines = ["start,length_hours,class,reason"]
    n_filled = 0
    for gap in report.gaps:
        reason = None
        if gap.gap_class == "short":
            reason = "short gap; below fillable band"
        elif gap.gap_class == "structural" and not args.force_structural:
            reason = "structural gap; rerun with --force-structural to fill"
        if reason:
            skipped_lines.append(f"{gap.start},{gap.length},{gap.gap_class},{reason}")
            print(f"skipped gap at {gap.start} ({gap.length}h): {reason}")
            continue
        if gap.gap_class == "structural":
            print(
                f"warning: filling structural gap at {gap.start} "
                f"({gap.length}h); statistical fills are unreliable at this length"
            )
        result, reason = _fill_gap(args, gap, x_hf, hf, x_lf, lf, config)
        if result is None:
            skipped_lines.append(f"{gap.start},{gap.length},{gap.gap_class},{reason}")
            print(f"skipped gap at {gap.start} ({gap.length}h): {reason}")
            continue
        for t, m, lo, hi in zip(
            result.query, result.mean, result.lower, result.upper
        ):
            ts = origin + np.timedelta64(int(round(t * 3600)), "s")
            filled_lines.append(
                f"{ts},{float(m)!r},{float(lo)!r},{float(hi)!r},{result.model}"
            )
        n_filled += 1

    with open(
        os.path.join(args.out, "filled.csv"), "w", encoding="utf-8", newline="\n"
    ) as fh:
        fh.write("\n".join(filled_lines) + "\n")
    with open(
        os.path.join(args.out, "skipped.csv"), "w", encoding="utf-8", newline="\n"
    ) as fh:
        fh.write("\n".join(skipped_lines) + "\n")
    _write_manifest(
        args.out,
        {
            "command": "fill",
            "hf": args.hf,
            "lf": args.lf,
            "model": args.model,
            "seed": args.seed,
            "window": args.window,
            "force_structural": args.force_structural,
            "gaps_filled": n_filled,
            "gaps_total": len(report.gaps),
        },
    )
    print(f"filled {n_filled} of {len(report.gaps)} gaps; wrote {args.out}/filled.csv")
    return 0


def _fill_gap(args, gap, x_hf, hf, x_lf, lf, config):
    """Fit on a context window around one gap; returns (result, reason)."""
    gap_x = x_hf[gap.start_index : gap.start_index + gap.length]
    lo_w, hi_w = gap_x[0] - args.window, gap_x[-1] + args.window

    lf_ok = np.isfinite(lf.values)
    lf_win = lf_ok & (x_lf >= lo_w) & (x_lf <= hi_w)
    x_lo, y_lo = x_lf[lf_win], lf.values[lf_win]
    needs_lf = args.model in ("mfgp", "bcmf", "wmfgp")
    if needs_lf and not np.all(np.isin(gap_x, x_lo)):
        return None, "LF series missing inside the gap"

    hf_ok = np.isfinite(hf.values)
    hf_win = hf_ok & (x_hf >= lo_w) & (x_hf <= hi_w)
    if needs_lf:
        hf_win &= np.isin(x_hf, x_lo)  # nesting: drop HF points LF lacks
    x_hi, y_hi = x_hf[hf_win], hf.values[hf_win]

    if x_hi.size < 3 or (needs_lf and x_lo.size < 3):
        return None, "too few observed points in the context window"
    if args.model in ("wgp", "wmfgp") and x_hi.size < WARP_MIN:
        return None, f"warped models need >= {WARP_MIN} HF points in the window"
    if args.model == "wmfgp" and x_lo.size < WARP_MIN:
        return None, f"warped models need >= {WARP_MIN} LF points in the window"
    try:
        result = _fill_one(args.model, x_lo, y_lo, x_hi, y_hi, gap_x, config)
    except GapFusionError as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return result, None


def _cmd_cluster(args) -> int:
    stations = load_stations(args.stations)
    clustering = constrained_kmeans(
        stations, args.k, args.min_size, args.max_size, args.seed or 0
    )
    os.makedirs(args.out, exist_ok=True)
    write_clustering(os.path.join(args.out, "assignments.csv"), clustering)
    if args.report_k_max:
        rows = cluster_report(
            stations,
            range(2, args.report_k_max + 1),
            args.min_size,
            args.max_size,
            args.seed or 0,
        )
        write_cluster_report(os.path.join(args.out, "k_report.csv"), rows)
    _write_manifest(
        args.out,
        {
            "command": "cluster",
            "stations": args.stations,
            "k": args.k,
            "min_size": args.min_size,
            "max_size": args.max_size,
            "seed": args.seed,
            "objective": clustering.objective,
            "sizes": clustering.sizes().tolist(),
        },
    )
    sizes = clustering.sizes()
    print(
        f"{len(stations)} stations -> {args.k} clusters; "
        f"sizes {sizes.min()}..{sizes.max()}, mean {sizes.mean():.2f}"
    )
    print(f"wrote {args.out}/assignments.csv")
    return 0


def _cmd_report_gaps(args) -> int:
    series, rejects = load_series_csv(args.series)
    hourly = hourly_aggregate(series)
    report = detect_and_classify_gaps(hourly)
    os.makedirs(args.out, exist_ok=True)
    report.to_csv(os.path.join(args.out, "gaps.csv"))
    report.histogram_to_csv(os.path.join(args.out, "gap_histogram.csv"))
    if rejects:
        write_rejects_csv(os.path.join(args.out, "rejects.csv"), rejects)
    counts = {c: len(report.by_class(c)) for c in ("short", "target", "structural")}
    _write_manifest(
        args.out,
        {
            "command": "report-gaps",
            "series": args.series,
            "n_hours": int(hourly.values.size),
            "gap_counts": counts,
            "rejected_rows": len(rejects),
        },
    )
    print(
        f"{len(report.gaps)} gaps: {counts['short']} short, "
        f"{counts['target']} target, {counts['structural']} structural"
    )
    print(f"wrote {args.out}/gaps.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapfusion",
        description="Fill long gaps in a skewed series by fusing it with a "
        "correlated lower-quality series.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, default_out):
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--out", default=default_out, help="output directory")

    p = sub.add_parser("simulate-random", help="scattered-missingness experiment")
    add_common(p, "runs/random")
    p.add_argument("--config", help="ScenarioConfig JSON file")
    p.add_argument("--reps", type=int, default=None, help="replication count")
    p.add_argument(
        "--full-scale",
        action="store_true",
        help=f"run {FULL_SCALE_RANDOM_REPS} replications",
    )
    p.add_argument("--workers", type=int, default=1, help="parallel workers")
    p.set_defaults(func=_cmd_simulate_random)

    p = sub.add_parser("simulate-structural", help="contiguous-gap experiment")
    add_common(p, "runs/structural")
    p.add_argument("--config", help="ScenarioConfig JSON file")
    p.add_argument("--reps", type=int, default=None, help="replications per gap")
    p.add_argument(
        "--full-scale",
        action="store_true",
        help=f"run {FULL_SCALE_STRUCTURAL_REPS} replications per gap",
    )
    p.add_argument(
        "--gap-lengths",
        default="24,48,72,96,192",
        help="comma-separated gap lengths in hours",
    )
    p.add_argument("--workers", type=int, default=1, help="parallel workers")
    p.set_defaults(func=_cmd_simulate_structural)

    p = sub.add_parser("fill", help="fill gaps in an HF series using an LF series")
    add_common(p, "runs/fill")
    p.add_argument("--hf", required=True, help="high-fidelity series CSV")
    p.add_argument("--lf", required=True, help="low-fidelity series CSV")
    p.add_argument("--model", choices=FILL_MODELS, default="wmfgp")
    p.add_argument(
        "--window",
        type=int,
        default=DEFAULT_WINDOW,
        help="context hours on each side of a gap",
    )
    p.add_argument(
        "--force-structural",
        action="store_true",
        help="also fill gaps longer than 192 hours",
    )
    p.set_defaults(func=_cmd_fill)

    p = sub.add_parser("cluster", help="size-constrained station clustering")
    add_common(p, "runs/cluster")
    p.add_argument("--stations", required=True, help="station CSV (id,lon,lat,alt)")
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--min-size", type=int, default=3)
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument(
        "--report-k-max",
        type=int,
        default=0,
        help="also write an elbow/silhouette report for k=2..N",
    )
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("report-gaps", help="detect and classify gaps in a series")
    add_common(p, "runs/gaps")
    p.add_argument("--series", required=True, help="series CSV")
    p.set_defaults(func=_cmd_report_gaps)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GapFusionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
