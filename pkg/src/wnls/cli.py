"""``wnls <subcommand> --config <path> [--threads K] [--seed S] [--out DIR]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import EXPERIMENTS, ConfigError, default_config, load_config
from .experiments import EXIT_FAIL, run

log = logging.getLogger("wnls")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wnls", description=__doc__)
    p.add_argument("--version", action="version", version=f"wnls {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        s = sub.add_parser(name.replace("_", "-"), help=f"run the {name} experiment")
        s.add_argument("--config", type=Path, help="config file; defaults are used if omitted")
        s.add_argument("--threads", type=int, default=1, help="worker cap (1 is bit-reproducible)")
        s.add_argument("--seed", type=int, help="root seed, overrides [ensemble] seed")
        s.add_argument("--out", type=Path, help="output directory, overrides [output] dir")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    name = args.command.replace("-", "_")
    try:
        cfg = load_config(args.config, name) if args.config else default_config(name)
        if args.seed is not None:
            cfg = cfg.set("ensemble", "seed", args.seed)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = cfg.set("ensemble", "threads", args.threads)
    except (ConfigError, OSError) as exc:
        print(f"wnls: invalid config: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = args.out or Path(cfg["output"]["dir"])
    rep = run(cfg, out)
    for c in rep.checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}: {c['value']} (tol {c['tol']})")
    print(f"exit {rep.exit_code}; report written to {out / 'report.json'}")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
