# distinguisher/main.py - command-line entry point
import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv

from distinguisher.commands import apps, bench, counterexamples, lemma, verify
from distinguisher.deps import configure_logging
from distinguisher.schemas import to_json_line

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distinguisher",
        description="Constant-probability distinguishers: exact verification, Monte Carlo and applications.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    # Include every command group
    verify.register(subparsers)
    lemma.register(subparsers)
    counterexamples.register(subparsers)
    apps.register(subparsers)
    bench.register(subparsers)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, dispatch to one command and print its result.

    Returns:
        0 on success, 1 when a verified bound is violated, 2 on usage or input errors
    """
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    configure_logging(args.verbose)

    result = args.handler(args)
    if not result.ok:
        print(f"error: {result.error}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        for item in result.data or []:
            print(to_json_line(item))
    elif result.text:
        print(result.text)
    return EXIT_CHECK_FAILED if result.failed_checks else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
