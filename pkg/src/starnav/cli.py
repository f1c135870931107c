"""Command line front end.

Subcommands:
    fit <scan-file>                  fit one scan, report segment count and RMS
    run <scenario-file> --seed S     run one episode and export artifacts
    batch <scenario-file> --seeds N  run a seeded batch and export the summary
    plot <record-file>               re-render the SVG for a saved run record

Exit codes: 0 success/summary, 2 NoPath or Timeout, 3 Collision, 1 usage or
IO errors. Output directory defaults to $STARNAV_OUT, then ./starnav_out.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .episode import Outcome, run_episode, summarize_runs
from .export import export_artifacts, load_record, write_svg
from .scenario import ScenarioError, load_scan, load_scenario
from .starshape import TooFewPoints, fit_region

OUT_ENV_VAR = "STARNAV_OUT"

_EXIT_BY_OUTCOME = {
    Outcome.SUCCESS: 0,
    Outcome.TIMEOUT: 2,
    Outcome.NO_PATH: 2,
    Outcome.COLLISION: 3,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract reserves 2 for
    NoPath/Timeout, so usage errors remap to 1."""

    def error(self, message: str) -> None:  # noqa: D102 - argparse override
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _resolve_out(arg: str | None) -> str:
    return arg or os.environ.get(OUT_ENV_VAR) or "starnav_out"


def _apply_overrides(spec, args):
    if args.dt is not None:
        spec = replace(spec, loop=replace(spec.loop, dt=args.dt))
    if args.max_time is not None:
        spec = replace(spec, limits=replace(spec.limits, max_sim_time=args.max_time))
    if args.noise is not None:
        spec = replace(spec, lidar=replace(spec.lidar, noise_stddev=args.noise))
    return spec


def _add_common(sub) -> None:
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--dt", type=float, default=None, help="control tick length [s]")
    sub.add_argument("--max-time", type=float, default=None,
                     help="episode sim-time limit [s]")
    sub.add_argument("--noise", type=float, default=None,
                     help="lidar range noise stddev [m]")
    sub.add_argument("--no-timing", action="store_true",
                     help="log all timings as 0.0 for reproducible exports")


def _cmd_fit(args) -> int:
    scan = load_scan(args.scan_file)
    region = fit_region(scan.origin, scan)
    radii = np.array([region.boundary.radius(t) for t in scan.angles])
    rms = float(np.sqrt(np.mean((radii - scan.ranges) ** 2)))
    worst = float(np.max(np.abs(radii - scan.ranges)))
    print(f"beams: {len(scan)}")
    print(f"segments: {len(region.boundary.segments)}")
    print(f"rms: {rms:.6f} m")
    print(f"max_error: {worst:.6f} m")
    return 0


def _cmd_run(args) -> int:
    spec = _apply_overrides(load_scenario(args.scenario_file), args)
    seed = args.seed if args.seed is not None else spec.seed
    record = run_episode(spec, seed, measure_timing=not args.no_timing)
    paths = export_artifacts(record, _resolve_out(args.out))
    print(f"outcome: {record.outcome.value}")
    print(f"travel_time: {record.travel_time:.3f} s")
    print(f"path_length: {record.path_length:.3f} m")
    for path in paths:
        print(f"wrote {path}")
    return _EXIT_BY_OUTCOME[record.outcome]


def _cmd_batch(args) -> int:
    spec = _apply_overrides(load_scenario(args.scenario_file), args)
    seeds = [spec.seed + i for i in range(args.seeds)]
    records = [run_episode(spec, s, measure_timing=not args.no_timing)
               for s in seeds]
    summary = summarize_runs(records)
    paths = export_artifacts(summary, _resolve_out(args.out))
    print(f"n_runs: {summary.n_runs}")
    print(f"success_rate: {summary.success_rate:.3f}")
    print(f"travel_time: {summary.travel_time_mean:.3f} ± {summary.travel_time_std:.3f} s")
    print(f"path_length: {summary.path_length_mean:.3f} ± {summary.path_length_std:.3f} m")
    print(f"control: {summary.control_ms_mean:.3f} ± {summary.control_ms_std:.3f} ms")
    print(f"fit: {summary.fit_ms_mean:.3f} ± {summary.fit_ms_std:.3f} ms")
    for seed, outcome in summary.outcomes:
        print(f"  seed {seed}: {outcome}")
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_plot(args) -> int:
    record = load_record(args.record_file)
    out_dir = _resolve_out(args.out)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"run_{record.seed}.svg")
    write_svg(record, path)
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="starnav",
                     description="starshaped-region navigation benchmark")
    subs = parser.add_subparsers(dest="command", required=True)

    p_fit = subs.add_parser("fit", help="fit a starshaped region to a scan file")
    p_fit.add_argument("scan_file")
    p_fit.set_defaults(func=_cmd_fit)

    p_run = subs.add_parser("run", help="run one episode")
    p_run.add_argument("scenario_file")
    p_run.add_argument("--seed", type=int, default=None)
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_batch = subs.add_parser("batch", help="run a seeded batch")
    p_batch.add_argument("scenario_file")
    p_batch.add_argument("--seeds", type=int, required=True,
                         help="number of consecutive seeds, starting at the scenario seed")
    _add_common(p_batch)
    p_batch.set_defaults(func=_cmd_batch)

    p_plot = subs.add_parser("plot", help="render the SVG for a saved record")
    p_plot.add_argument("record_file")
    p_plot.add_argument("--out", default=None, help="output directory")
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ScenarioError, TooFewPoints, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
