"""Command line entry point.

    retroptics run penrose.scn --format tsv
    retroptics run --builtin penrose-fig3 --observe d1=1,d2=0,d3=0,d4=1
    retroptics run --builtin penrose-fig3 --sweep epsilon:1e-4:1e-1:4:log

Exit codes: 0 success, 1 usage or parse error, 2 impossible observation,
3 numerical validation failure.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Optional, Sequence

from ..errors import (
    ImpossibleObservationError,
    InvalidArgumentError,
    InvalidElementError,
    ResourceError,
    ScenarioError,
)
from .report import render_tables
from .runner import run_scenario, sweep, sweep_summary
from .scenario import BUILTINS, builtin_text, load_scenario, parse_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IMPOSSIBLE = 2
EXIT_NUMERICAL = 3

ORACLE_TOLERANCE = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_observe(text: str, num_modes: int) -> dict[int, int]:
    observed = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        match = re.fullmatch(r"d(\d+)\s*=\s*(\d+)", item)
        if not match:
            raise UsageError(f"bad --observe entry '{item}', expected d<mode>=<count>")
        mode, count = int(match.group(1)), int(match.group(2))
        if not 1 <= mode <= num_modes:
            raise UsageError(f"--observe: mode d{mode} does not exist in a {num_modes}-mode scenario")
        observed[mode - 1] = count
    if not observed:
        raise UsageError("--observe needs at least one d<mode>=<count> entry")
    return observed


def parse_sweep(text: str) -> tuple[str, float, float, int, bool]:
    parts = text.split(":")
    if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "linear")):
        raise UsageError(f"bad --sweep '{text}', expected <param>:<lo>:<hi>:<steps>[:log]")
    try:
        lo, hi, steps = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError(f"bad --sweep '{text}': lo/hi must be numbers and steps an integer") from None
    return parts[0], lo, hi, steps, len(parts) == 5 and parts[4] == "log"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="retroptics", description="Linear-optics retrodiction simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run a scenario file or a builtin scenario")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("file", nargs="?", help="scenario file")
    source.add_argument("--builtin", choices=sorted(BUILTINS), help="shipped scenario")
    run.add_argument("--observe", help="detector record, e.g. d1=1,d4=1 (replaces [observe])")
    run.add_argument("--sweep", help="<param>:<lo>:<hi>:<steps>[:log]")
    run.add_argument("--oracle", action="store_true", help="cross-check against the dense matrix oracle")
    run.add_argument("--format", choices=("table", "tsv"), default="table")
    run.add_argument("--out", help="write the report here instead of stdout")
    return parser


def _execute(args) -> tuple[str, int]:
    scenario = (
        parse_scenario(builtin_text(args.builtin)) if args.builtin else load_scenario(args.file)
    )
    if args.observe:
        scenario = scenario.with_observe(parse_observe(args.observe, scenario.num_modes))

    sweep_args = None
    if args.sweep:
        sweep_args = parse_sweep(args.sweep)
    elif scenario.sweep is not None:
        s = scenario.sweep
        sweep_args = (s.parameter, s.lo, s.hi, s.steps, s.scale == "log")

    if sweep_args is not None:
        parameter, lo, hi, steps, log = sweep_args
        results = sweep(scenario, parameter, lo, hi, steps, log=log, oracle=args.oracle)
        reports = [r for _, r in results]
        text = render_tables([sweep_summary(parameter, results)], args.format, header=scenario.to_text())
        for value, report in results:
            text += f"\n# ==== {parameter} = {value!r} ====\n"
            text += render_tables(report.tables(), args.format)
    else:
        report = run_scenario(scenario, oracle=args.oracle)
        reports = [report]
        text = report.render(args.format)

    problems = [msg for r in reports for msg in r.validation_errors()]
    problems += [
        f"oracle deviation {r.oracle_deviation!r} exceeds {ORACLE_TOLERANCE}"
        for r in reports
        if r.oracle_deviation is not None and r.oracle_deviation > ORACLE_TOLERANCE
    ]
    if problems:
        return text + "".join(f"# VALIDATION FAILED: {p}\n" for p in problems), EXIT_NUMERICAL
    return text, EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = _execute(args)
    except (UsageError, ScenarioError, ResourceError, InvalidArgumentError, OSError) as exc:
        print(f"retroptics: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImpossibleObservationError as exc:
        print(f"retroptics: impossible observation: {exc}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    except InvalidElementError as exc:
        print(f"retroptics: numerical validation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_NUMERICAL:
        print("retroptics: numerical validation failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
