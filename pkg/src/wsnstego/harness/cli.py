"""Command line entry point: ``wsnstego {simulate,attack,train-eval,experiment}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import load_config
from .pipeline import cmd_attack, cmd_experiment, cmd_simulate, cmd_train_eval

_COMMANDS = {
    "simulate": cmd_simulate,
    "attack": cmd_attack,
    "train-eval": cmd_train_eval,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsnstego", description="Simulate a sensor field, attack its sink view and score detectors.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--seed", type=lambda s: int(s, 0), help="override the master seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int, help="worker processes for dataset generation")
        p.add_argument("--resume", action="store_true", help="reuse outputs already on disk")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any configuration key (repeatable)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            print(f"--set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        overrides[key.strip()] = value.strip()
    for key in ("seed", "out", "workers"):
        if getattr(args, key) is not None:
            overrides[key] = str(getattr(args, key))
    try:
        cfg = load_config(args.config, overrides)
        result = _COMMANDS[args.command](cfg, resume=args.resume)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"wsnstego {args.command}: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, dict):
        print(json.dumps(result, sort_keys=True))
    elif isinstance(result, list):
        for item in result:
            print(json.dumps(item, sort_keys=True) if isinstance(item, dict) else item)
    return 0


if __name__ == "__main__":
    sys.exit(main())
