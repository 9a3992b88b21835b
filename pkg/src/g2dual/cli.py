"""Command-line driver for ``.g2t`` model files."""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from typing import Optional, Sequence

from .modelfile import ModelSyntaxError, parse_model, print_model
from .runner import run

BUNDLED = ("example1", "example2", "example3")


def bundled_model(name: str) -> str:
    return resources.files("g2dual.models").joinpath(f"{name}.g2t").read_text(encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="g2dual",
        description="Run the verification tasks of a .g2t model file.",
    )
    p.add_argument("path", nargs="?", help="model file (same as --model)")
    p.add_argument("--model", help="model file to run")
    p.add_argument("--example", choices=BUNDLED, help="run one of the bundled models")
    p.add_argument("--task", help="only report tasks with this command name")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--verbose", action="store_true", help="list passing verdicts too")
    p.add_argument("--print-model", action="store_true", help="print the canonical model text and exit")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    sources = [x for x in (args.path, args.model, args.example) if x]
    if len(sources) != 1:
        print("error: give exactly one of PATH, --model or --example", file=sys.stderr)
        return 2
    try:
        if args.example:
            text = bundled_model(args.example)
        else:
            with open(sources[0], encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        model = parse_model(text)
    except ModelSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 2
    if args.print_model:
        sys.stdout.write(print_model(model))
        return 0

    result = run(model, only=args.task)
    if args.json:
        print(result.to_json())
    else:
        text = result.to_text(verbose=args.verbose)
        if text:
            print(text)
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
