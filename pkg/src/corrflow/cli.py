"""Command line interface: ``corrflow run | check | sweep``."""
import argparse
import logging
import sys

from .exceptions import CorrflowError, ScenarioError
from .report import dumps_json, emit_timeseries_csv, run_check_suite
from .scenario import load_scenario
from .sweep import emit_sweep_csv, load_family, run_sweep

log = logging.getLogger("corrflow")


def _cmd_run(args):
    scenario = load_scenario(args.scenario)
    series = scenario.run(strict=False)
    for sample in series.flagged:
        log.warning("t=%r: guard flags %d", sample.time, sample.guard_flags)
    emit_timeseries_csv(series, args.out if args.out else sys.stdout)
    return 0


def _cmd_check(args):
    return run_check_suite(args.inputs, report=args.report if args.report else sys.stdout)


def _cmd_sweep(args):
    family = load_family(args.family)
    summary = run_sweep(family, jobs=args.jobs)
    if args.out:
        emit_sweep_csv(summary, args.out)
    sys.stdout.write(dumps_json(summary.to_dict()))
    log.info("%d trajectories, mean wall time %.4fs", len(summary.evaluated), summary.mean_wall_time)
    return 1 if summary.violations else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="corrflow",
        description="Free-particle wavepacket moments and the position-momentum correlation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario and write its moment time series as CSV")
    p.add_argument("scenario")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("check", help="evaluate oracle gates for scenario files or directories")
    p.add_argument("inputs", nargs="+", metavar="dir-or-file")
    p.add_argument("--report", help="JSON report path (default: stdout)")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("sweep", help="monotonicity sweep over a family of Gaussian states")
    p.add_argument("family")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="per-point CSV output path")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except ScenarioError as exc:
        for issue in exc.errors:
            print(f"error: {issue}", file=sys.stderr)
        return 2
    except (CorrflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
