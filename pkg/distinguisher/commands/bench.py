"""bench: timing table of the sampling decision against the polynomial."""
import argparse

from distinguisher.commands import common_parser
from distinguisher.deps import render, resolve_seed
from distinguisher.schemas import CommandResult
from distinguisher.services.bench import run_bench


def bench(args: argparse.Namespace) -> CommandResult:
    # Absolute times are reported only; the ratio gate is soft and never fails the command.
    try:
        report = run_bench(args.iterations, resolve_seed(args.seed))
        return CommandResult(ok=True, data=[report], text=render("bench.txt.j2", report=report))
    except ValueError as e:
        return CommandResult(ok=False, error=f"Benchmark failed: {e}")


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", parents=[common_parser()], help="time the sampling decision")
    parser.add_argument("--iterations", type=int, default=10 ** 7)
    parser.set_defaults(handler=bench)
