"""Command line entry point: ``udn-sg sweep | figure | check``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

from . import acceptance, sweep
from .errors import UDNError

log = logging.getLogger("udn_sg")


def _threads(value) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--threads must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_threads, default=None,
                        help=f"worker processes (env {sweep.ENV_THREADS}, default 1)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the Monte Carlo seed")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="udn-sg",
        description="Coverage and rate of ultra-dense networks with bounded path loss.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="run a JSON sweep config")
    p.add_argument("--config", required=True, help="path to the sweep config (JSON)")
    p.add_argument("--out", default=None,
                   help=f"output directory (overrides the config and {sweep.ENV_OUTPUT_DIR})")

    p = sub.add_parser("figure", parents=[common], help="reproduce one figure")
    p.add_argument("name", choices=sweep.FIGURES)
    p.add_argument("--out", default=None,
                   help=f"output directory (default ${sweep.ENV_OUTPUT_DIR} or .)")

    p = sub.add_parser("check", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", type=int, nargs="+", choices=sorted(acceptance.CHECKS),
                   help="run only these criteria")
    return parser


def _output_dir(arg, fallback) -> str:
    return arg or os.environ.get(sweep.ENV_OUTPUT_DIR) or fallback


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    threads = args.threads or sweep.default_threads()
    try:
        if args.command == "sweep":
            config = sweep.SweepConfig.load(args.config)
            env_out = os.environ.get(sweep.ENV_OUTPUT_DIR)
            if args.out or env_out:
                config.output_dir = args.out or env_out
            if args.seed is not None:
                config.mc = dataclasses.replace(config.mc, seed=args.seed)
            for path in sweep.run_sweep(config, threads):
                print(path)
        elif args.command == "figure":
            for path in sweep.reproduce_figure(args.name, _output_dir(args.out, "."), threads):
                print(path)
        else:
            results = acceptance.run_checks(args.only, seed=args.seed)
            failed = [r.number for r in results if not r.passed]
            print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
            return 1 if failed else 0
    except (UDNError, ValueError, OSError, KeyError) as exc:
        print(f"udn-sg: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
