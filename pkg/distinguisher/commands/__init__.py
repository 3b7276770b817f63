"""
Command groups of the CLI. Each module exposes register(subparsers) and
handlers that take the parsed arguments and return a CommandResult.
"""
import argparse
from pathlib import Path
from typing import List, Optional, Tuple

from distinguisher.errors import InputFormatError
from distinguisher.schemas import Universe
from distinguisher.services import monoid
from distinguisher.services.corpus import BUILTIN, load_corpus
from distinguisher.services.distinguish import ValueAssignment, accumulate, parse_stream


def int_list(text: str) -> List[int]:
    """argparse type for comma-separated integers."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--json", action="store_true", help="emit JSON lines instead of a table")
    parser.add_argument("--seed", type=int, default=None, help="seed (default: $DISTINGUISHER_SEED or 0)")
    parser.add_argument("--workers", type=int, default=1, help="processes for seed enumeration")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    return parser


def add_assignment_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", default=BUILTIN, help="'builtin' or a corpus JSON file")
    parser.add_argument("--assignment", type=Path, default=None, help="file of '<key> <value>' lines")
    parser.add_argument("--monoid", default="f2", help="monoid of --assignment: f2, wrapint64, intvector:<n>")
    parser.add_argument("--max-n", type=int, default=None, help="skip corpus entries with more keys")


def read_assignment(path: Path, universe: Universe, monoid_name: str) -> ValueAssignment:
    tag = monoid.parse_tag(monoid_name)
    try:
        with open(path, "r") as f:
            return accumulate(universe, tag, parse_stream(f, tag))
    except OSError as e:
        raise InputFormatError(f"cannot read {path}: {e}")


def assignments_for(args: argparse.Namespace, universe: Universe, max_n: Optional[int] = None) -> List[Tuple[str, ValueAssignment]]:
    """(label, assignment) pairs from --assignment, else from the corpus mapped onto `universe`."""
    if args.assignment is not None:
        return [(args.assignment.name, read_assignment(args.assignment, universe, args.monoid))]
    limit = args.max_n if args.max_n is not None else max_n
    out = []
    for entry in load_corpus(args.corpus):
        v = entry.assignment(universe)
        if v.n == 0 or (limit is not None and v.n > limit):
            continue
        out.append((entry.label, v))
    return out
