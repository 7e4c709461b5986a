"""Command-line entry point: ``python -m laurent_mtr <subcommand> ...``."""

import argparse
import json
import logging
import os
import sys

from . import experiment, metrics
from .errors import ConfigError, LaurentMTRError
from .symbolic import LAURENT_PRECISION, equations_document, render_equation

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("laurent_mtr")


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must be non-empty")
    return values


def _common(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=default(None), help="run config (JSON)")
    parser.add_argument("--out", default=default(None), help="output directory")
    parser.add_argument("--seed", type=int, default=default(None), help="override the training seed")
    parser.add_argument("--jobs", type=int, default=default(1), help="parallel worker processes")
    parser.add_argument("--force", action="store_true", default=default(False),
                        help="overwrite an existing output directory")


def build_parser():
    p = argparse.ArgumentParser(prog="laurent_mtr",
                                description="Growing power-term networks for multi-target regression.")
    _common(p, suppress=False)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("train", help="train a model and write a run directory")
    s.add_argument("--laurent", action="store_true", help="integer exponents (precision 1.0)")

    s = sub.add_parser("eval", help="network and equation metrics for a run")
    s.add_argument("run_dir")
    s.add_argument("--data", help="external CSV with the run's columns")
    s.add_argument("--split", choices=("train", "test"), default="test")

    s = sub.add_parser("extract", help="print a run's equations")
    s.add_argument("run_dir")
    s.add_argument("--format", choices=("text", "latex", "json"), default="text")
    s.add_argument("--laurent", action="store_true", help="re-extract with integer exponents")
    s.add_argument("--precision", type=float, help="re-extract at this rounding precision")

    s = sub.add_parser("sweep-input", help="one-at-a-time input sweep of an equation")
    s.add_argument("run_dir")
    s.add_argument("--target", type=int, default=1, help="1-based target number")
    s.add_argument("--grid-size", type=int, default=100)

    s = sub.add_parser("sweep-pabs", help="train over a grid of (k_init, k_max)")
    s.add_argument("--k-max", type=_int_list, required=True, help="e.g. 2,4,6,8")
    s.add_argument("--k-init", type=_int_list, default=[1], help="e.g. 1,2,3")

    sub.add_parser("ablate", help="runs with and without the symbolic loss")

    for s in sub.choices.values():
        _common(s, suppress=True)
    return p


def _config(args):
    if not args.config:
        raise ConfigError("--config", "this subcommand needs --config")
    cfg = experiment.load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_train(seed=args.seed)
    return cfg


def _out(args, default):
    return args.out or default


def cmd_train(args):
    cfg = _config(args)
    if args.laurent:
        cfg = cfg.with_train(precision=LAURENT_PRECISION)
    run_dir = _out(args, "runs/train")
    report = experiment.run_train(cfg, run_dir, args.force)
    print(json.dumps({"run_dir": run_dir, **report.summary()}, indent=2))


def cmd_eval(args):
    net, eq = experiment.run_eval(args.run_dir, args.data, args.split)
    text = metrics.table_csv([("network", net), ("equation", eq)])
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def cmd_extract(args):
    precision = LAURENT_PRECISION if args.laurent else args.precision
    eqs = experiment.run_extract(args.run_dir, precision)
    if args.format == "json":
        text = json.dumps(equations_document(eqs), indent=2) + "\n"
    else:
        text = "".join(render_equation(e, args.format) + "\n" for e in eqs)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def cmd_sweep_input(args):
    path = _out(args, os.path.join(args.run_dir, f"sweep_input_y{args.target}.csv"))
    if os.path.exists(path) and not args.force:
        raise FileExistsError(f"{path} already exists; pass --force to overwrite")
    _, _, _, eqs = experiment.load_run(args.run_dir)
    if not 1 <= args.target <= len(eqs):
        raise ConfigError("--target", f"expected 1..{len(eqs)}, got {args.target}")
    rows = experiment.sweep_input(args.run_dir, args.target - 1, args.grid_size)
    experiment.write_rows(path, ("feature", "x_original_units", "y"), rows)
    print(path)


def cmd_sweep_pabs(args):
    cfg = _config(args)
    out = _out(args, "runs/sweep_pabs")
    rows = experiment.sweep_pabs(cfg, out, args.k_max, args.k_init, args.jobs, args.force)
    for r in rows:
        print(",".join(repr(v) if isinstance(v, float) else str(v) for v in r))


def cmd_ablate(args):
    cfg = _config(args)
    out = _out(args, "runs/ablate")
    labelled, _ = experiment.ablate(cfg, out, args.force)
    sys.stdout.write(metrics.table_csv(labelled))


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "extract": cmd_extract,
    "sweep-input": cmd_sweep_input,
    "sweep-pabs": cmd_sweep_pabs,
    "ablate": cmd_ablate,
}


def _fail(code, exc):
    err = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        err["key"] = exc.key
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        return _fail(EXIT_CONFIG, ConfigError("--jobs", "must be >= 1"))
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except (LaurentMTRError, OSError, ValueError) as exc:
        return _fail(EXIT_RUNTIME, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
