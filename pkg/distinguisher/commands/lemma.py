"""lemma: single checks and full sweeps of the interval inequalities."""
import argparse

from distinguisher.commands import common_parser, int_list
from distinguisher.deps import render
from distinguisher.errors import ParameterSpaceError
from distinguisher.schemas import CommandResult
from distinguisher.services import verify

LEMMAS = ("good-sum", "good-sum-sweep", "tail", "tail-sweep", "expected-gap")


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ParameterSpaceError(f"lemma {args.name} needs {', '.join(missing)}")


def lemma(args: argparse.Namespace) -> CommandResult:
    try:
        if args.name == "good-sum":
            _require(args, "w", "z", "k")
            results = [verify.check_good_sum_lemma(args.w, args.z, args.k)]
        elif args.name == "good-sum-sweep":
            ws = [args.w] if args.w is not None else range(args.w_min, args.w_max + 1)
            results = [verify.sweep_good_sum_lemma(w) for w in ws]
        elif args.name == "tail":
            _require(args, "p", "keys", "x", "delta")
            results = [verify.check_tail_bounds(args.scheme or "modprime", args.p, args.keys, args.x, args.delta)]
        elif args.name == "tail-sweep":
            _require(args, "p")
            schemes = [args.scheme] if args.scheme else ["affine2indep", "modprime"]
            results = [verify.sweep_tail_bounds(s, args.p, args.max_set, args.max_delta) for s in schemes]
        else:
            _require(args, "keys", "x")
            scheme = args.scheme or ("oddmul2w" if args.w is not None else "modprime")
            size = args.w if scheme == "oddmul2w" else args.p
            if size is None:
                raise ParameterSpaceError("expected-gap needs --w for oddmul2w, --p otherwise")
            results = [verify.check_expected_gap(scheme, size, args.keys, args.x)]
        failed = sum(1 for r in results if getattr(r, "violations", 0) or not getattr(r, "holds", True))
        return CommandResult(ok=True, data=results, failed_checks=failed, text=render("lemmas.txt.j2", results=results))
    except ValueError as e:
        return CommandResult(ok=False, error=f"Lemma check failed: {e}")


def register(subparsers) -> None:
    parser = subparsers.add_parser("lemma", parents=[common_parser()], help="check an interval inequality exactly")
    parser.add_argument("--name", required=True, choices=LEMMAS)
    parser.add_argument("--w", type=int, help="word size")
    parser.add_argument("--z", type=int, help="difference z in [1, 2^w)")
    parser.add_argument("--k", type=int, help="k in [1, 2^w]")
    parser.add_argument("--w-min", type=int, default=3)
    parser.add_argument("--w-max", type=int, default=10)
    parser.add_argument("--scheme", choices=["affine2indep", "modprime", "oddmul2w"], default=None)
    parser.add_argument("--p", type=int, help="prime modulus")
    parser.add_argument("--keys", type=int_list, help="key set, comma-separated")
    parser.add_argument("--x", type=int, help="key of the set whose interval is measured")
    parser.add_argument("--delta", type=int, help="length threshold")
    parser.add_argument("--max-set", type=int, default=3)
    parser.add_argument("--max-delta", type=int, default=8)
    parser.set_defaults(handler=lemma)
