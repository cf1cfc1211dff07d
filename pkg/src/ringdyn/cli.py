"""Command-line front end: ``ringdyn run|check|presets``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .errors import ScenarioError, TaskError
from .presets import PresetRegistry
from .scenario import execute, load_scenarios, write_outputs

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringdyn", description="Number-field and torus-dynamics experiments.")
    parser.add_argument("--preset-dir", default=None, help="directory of extra field/family preset YAML files")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every scenario in a file")
    run.add_argument("file")
    run.add_argument("--seed", type=int, default=0, help="seed for scenarios that do not set one")
    run.add_argument("--out-dir", default="reports", help="directory for JSON/CSV/summary files")
    run.add_argument("--threads", type=int, default=1, help="worker threads for data-parallel kernels")

    check = sub.add_parser("check", help="parse and validate a scenario file without running it")
    check.add_argument("file")
    check.add_argument("--seed", type=int, default=0)

    sub.add_parser("presets", help="list shipped and user presets")
    return parser


def _registry(args) -> PresetRegistry:
    return PresetRegistry(args.preset_dir)


def cmd_run(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        scenarios = load_scenarios(args.file, _registry(args), args.seed)
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INVALID
    status = EXIT_OK
    out_dir = Path(args.out_dir)
    for sc in scenarios:
        try:
            result = execute(sc, threads=max(1, args.threads))
        except TaskError as exc:
            print(f"error: TaskError: {exc}", file=err)
            status = EXIT_FAIL
            continue
        write_outputs(sc, result, out_dir)
        print(f"{sc.name} [{sc.task}] {'PASS' if result.passed else 'FAIL'}: {result.summary}", file=out)
        if not result.passed:
            status = EXIT_FAIL
    return status


def cmd_check(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        scenarios = load_scenarios(args.file, _registry(args), args.seed)
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INVALID
    for sc in scenarios:
        print(f"{sc.name} [{sc.task}] ok", file=out)
    return EXIT_OK


def cmd_presets(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        text = _registry(args).listing()
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    out.write(text)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "check": cmd_check, "presets": cmd_presets}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
