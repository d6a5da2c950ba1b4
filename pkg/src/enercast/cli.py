"""Command-line entry point: ``enercast {train,validate,forecast,plotdata,fixtures}``.

Exit status: 0 success, 2 usage/config error, 3 data error, 4 numeric or
training error.
"""
import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .errors import ConfigError, EnercastError

COMMANDS = {
    "train": "train on the whole dataset and save the model",
    "validate": "run 2-fold and k-fold cross validation",
    "forecast": "recursive multi-month forecast from a saved model",
    "plotdata": "write plot-ready CSV (from forecast tables or the published tables)",
    "fixtures": "write the published 2012/2013 tables and their metric reports",
}

# flag -> RunConfig field
FLAGS = {
    "data": "data_path",
    "scenario": "scenario_path",
    "model": "model_path",
    "out": "output_dir",
    "k": "k",
    "lag": "lag_window",
    "mode": "mode",
    "seed_init": "seed_init",
    "seed_shuffle": "seed_shuffle",
    "seed_fold": "seed_fold",
    "horizon": "horizon_months",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="enercast", description="Monthly electric energy consumption forecasting."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--data", help="historical monthly CSV")
        p.add_argument("--scenario", help="CSV with exogenous inputs for future months")
        p.add_argument("--model", help="model file (default: <out>/model.txt)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--k", type=int)
        p.add_argument("--lag", type=int)
        p.add_argument("--mode", choices=("chronological", "shuffled"))
        p.add_argument("--seed-init", type=int)
        p.add_argument("--seed-shuffle", type=int)
        p.add_argument("--seed-fold", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key")
        if name == "plotdata":
            p.add_argument("--forecast-2fold", help="forecast table from the 2-fold model")
            p.add_argument("--forecast-kfold", help="forecast table from the k-fold model")
    return parser


def resolve_config(args):
    cfg = pipeline.RunConfig()
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        cfg = pipeline.parse_config(path.read_text(encoding="utf-8"), cfg)
    extra = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        extra[key.strip()] = value.strip()
    flags = {field: getattr(args, flag) for flag, field in FLAGS.items()}
    return pipeline.with_overrides(pipeline.with_overrides(cfg, extra), flags)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
        if args.command == "train":
            pipeline.cmd_train(cfg)
        elif args.command == "validate":
            pipeline.cmd_validate(cfg)
        elif args.command == "forecast":
            pipeline.cmd_forecast(cfg)
            print("forecast produced by the model trained on all samples", file=sys.stderr)
        elif args.command == "plotdata":
            pipeline.cmd_plotdata(cfg, args.forecast_2fold, args.forecast_kfold)
        elif args.command == "fixtures":
            pipeline.cmd_fixtures(cfg)
    except EnercastError as exc:
        print(f"enercast {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
