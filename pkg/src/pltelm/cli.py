"""Command-line entry point: ``pltelm {curve,consistency,crossval,reduce,timing}``.

Exit codes: 0 success, 2 configuration or schedule error, 3 data error,
4 numerical error (singular matrix).
"""

import argparse
import json
import sys
from dataclasses import fields

from . import harness
from .errors import ConfigError, PltError
from .plt import DELTA_MODES


def _common(p):
    p.add_argument("--config", help="JSON file with defaults for any option below")
    p.add_argument("--dataset", help="CSV dataset (label in the last column by default)")
    p.add_argument("--label-column", type=int, dest="label_column")
    p.add_argument("--schedule", help="JSON class-introduction schedule")
    p.add_argument("--hidden", type=int, help="hidden neurons P")
    p.add_argument("--activation", choices=["sigmoid", "sine", "hardlimit"])
    p.add_argument("--chunk", type=int, help="chunk size b")
    p.add_argument("--init", type=int, help="initial block size N0")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.add_argument("--delta", choices=DELTA_MODES, help="new-column formula (default last-chunk)")
    p.add_argument("--stream-length", type=int, dest="stream_length",
                   help="close an open-ended last phase at this many samples")
    p.add_argument("--recycle", action="store_true", default=None,
                   help="reuse samples when a phase outruns the data")
    p.add_argument("--out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="pltelm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("curve", "learning curve over a scheduled stream"),
        ("consistency", "mean and std of final accuracy over several seeds"),
        ("crossval", "stratified k-fold cross-validation"),
        ("reduce", "weight calculations saved against a fixed-width OS-ELM"),
        ("timing", "learning curves for several introduction points"),
    ]:
        p = sub.add_parser(name, help=text)
        _common(p)
        if name == "reduce":
            p.add_argument("schedules", nargs="*", help="extra schedule files to tabulate")
        if name == "timing":
            p.add_argument("--points", default="6,71,131",
                           help="comma-separated introduction points (default 6,71,131)")
    return parser


def make_config(args):
    known = {f.name for f in fields(harness.ExperimentConfig)}
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(doc)
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if "dataset" not in values:
        if args.command != "reduce":
            raise ConfigError("--dataset is required")
        values["dataset"] = None
    return harness.ExperimentConfig(**values)


def _summary(result):
    if result.table is not None:
        for row in result.table:
            print(f"{row['dataset']}: {row['oselm_calculations']} vs {row['plt_calculations']} "
                  f"-> {row['percent_saved']}% saved")
        return
    for run in result.runs:
        events = ", ".join(f"{e.sample_index}:{'+'.join(e.labels)}" for e in run.events) or "none"
        print(f"{run.tag}: final accuracy {harness.fmt(run.final_accuracy)}, "
              f"recalibrations [{events}]")
    for key, value in result.summary.items():
        if isinstance(value, float):
            print(f"{key}: {harness.fmt(value)}")


def run(argv=None):
    args = build_parser().parse_args(argv)
    cfg = make_config(args)
    if args.command == "curve":
        result = harness.run_learning_curve(cfg)
    elif args.command == "consistency":
        result = harness.run_consistency(cfg)
    elif args.command == "crossval":
        result = harness.run_crossval(cfg)
    elif args.command == "reduce":
        scheds = ([cfg.schedule] if cfg.schedule else []) + list(args.schedules)
        if not scheds:
            raise ConfigError("reduce needs --schedule or schedule files")
        result = harness.run_reduction_report(cfg, scheds)
    else:
        try:
            points = [int(p) for p in args.points.split(",") if p.strip()]
        except ValueError:
            raise ConfigError(f"bad --points value {args.points!r}") from None
        result = harness.run_timing_study(cfg, points)
    _summary(result)
    if cfg.out:
        for path in harness.emit_outputs(result, cfg.out):
            print(f"wrote {path}")
    return result


def main(argv=None):
    try:
        run(argv)
    except PltError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: file not found", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error: invalid config JSON ({exc})", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
