"""``qclab <experiment> --config <file> [--seed S] [--out DIR]``."""

from __future__ import annotations

import argparse
import json
import os
import sys

__all__ = ["main", "build_parser", "load_config"]

NAMES = ("dioph-scan", "free-check", "cayley", "u1-scan", "complexity-scan", "flag",
         "geodesic", "holder", "cutloc")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qclab", description="Run a complexity experiment.")
    parser.add_argument("experiment", choices=NAMES)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=JSON",
                        help="override one parameter (repeatable)")
    return parser


def load_config(args: argparse.Namespace):
    """Defaults < config file < command-line flags."""
    from .errors import ConfigError
    from .experiments import ExperimentConfig

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if raw.get("experiment", args.experiment) != args.experiment:
        raise ConfigError(f"config is for {raw['experiment']!r}, not {args.experiment!r}")
    params = dict(raw.get("params", {}))
    extra = set(raw) - {"experiment", "params", "seed", "output_dir"}
    if extra:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(extra))}")
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=JSON, got {item!r}")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    seed = args.seed if args.seed is not None else raw.get("seed")
    out = args.out if args.out is not None else raw.get("output_dir", "out")
    return ExperimentConfig(args.experiment, params, seed, out)


def _cap_threads() -> None:
    n = os.environ.get("QCLAB_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = n


def main(argv=None) -> int:
    _cap_threads()
    from .errors import ConfigError
    from .experiments import run

    args = build_parser().parse_args(argv)
    try:
        entry = run(load_config(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(entry.to_json())
    if entry.error:
        print(f"{entry.experiment} finished with {entry.error}", file=sys.stderr)
    return entry.exit_code


if __name__ == "__main__":
    sys.exit(main())
