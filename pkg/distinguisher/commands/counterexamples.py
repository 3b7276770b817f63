"""counterexamples and ams."""
import argparse

from distinguisher.commands import common_parser, int_list
from distinguisher.deps import render, resolve_seed
from distinguisher.errors import ParameterSpaceError
from distinguisher.schemas import CommandResult, Universe
from distinguisher.services import monoid
from distinguisher.services.counterexamples import counterexample_suite
from distinguisher.services.distinguish import ValueAssignment
from distinguisher.services.moments import ams_moment_check, random_assignments


def counterexamples(args: argparse.Namespace) -> CommandResult:
    try:
        report = counterexample_suite(
            parity_u=args.parity_u,
            msb_keys=(args.msb_x, args.msb_y),
            tabulation_trials=args.tabulation_trials,
            prop2_ns=args.prop2_n,
            seed=resolve_seed(args.seed),
        )
        failed = sum(1 for r in report.results if not r.holds)
        text = render("counterexamples.txt.j2", report=report)
        return CommandResult(ok=True, data=[report], failed_checks=failed, text=text)
    except ValueError as e:
        return CommandResult(ok=False, error=f"Counterexample suite failed: {e}")


def ams(args: argparse.Namespace) -> CommandResult:
    """Moments of X for given values, or for --random seeded assignments."""
    try:
        seed = resolve_seed(args.seed)
        if args.random:
            assignments = random_assignments(args.random, seed, e=args.e)
        else:
            if not args.keys or not args.values or len(args.keys) != len(args.values):
                raise ParameterSpaceError("--keys and --values must list the same number of integers")
            if any(v == 0 for v in args.values):
                raise ParameterSpaceError("values must be non-zero")
            size = 1 << args.e if args.mode == "exact_gf2e" else max(args.keys) + 1
            universe = Universe.of_range(size)
            raw = dict(zip(args.keys, args.values))
            assignments = [ValueAssignment.from_raw(universe, monoid.WRAP_INT64, raw)]
        if args.mode == "exact_gf2e":
            reports = [ams_moment_check(v, "exact_gf2e", e=args.e) for v in assignments]
        else:
            params = {"field_param": args.field_param} if args.family == "polykindep" else {}
            reports = [
                ams_moment_check(v, "montecarlo", trials=args.trials, seed=seed, family=args.family, **params)
                for v in assignments
            ]
        failed = sum(1 for r in reports if not (r.fourth_moment_ok and r.nonzero_ok))
        return CommandResult(ok=True, data=reports, failed_checks=failed, text=render("moments.txt.j2", reports=reports))
    except ValueError as e:
        return CommandResult(ok=False, error=f"Moment check failed: {e}")


def register(subparsers) -> None:
    common = common_parser()

    suite = subparsers.add_parser("counterexamples", parents=[common], help="run the executable refutations")
    suite.add_argument("--parity-u", type=int, default=4)
    suite.add_argument("--msb-x", type=int, default=1)
    suite.add_argument("--msb-y", type=int, default=2)
    suite.add_argument("--tabulation-trials", type=int, default=10_000)
    suite.add_argument("--prop2-n", type=int, nargs="+", default=[2, 3, 4])
    suite.set_defaults(handler=counterexamples)

    moments = subparsers.add_parser("ams", parents=[common], help="fourth-moment check of 4-independent sampling")
    moments.add_argument("--mode", choices=["exact_gf2e", "montecarlo"], default="exact_gf2e")
    moments.add_argument("--e", type=int, default=4, help="field GF(2^e) of the exact mode")
    moments.add_argument("--keys", type=int_list)
    moments.add_argument("--values", type=int_list, help="non-zero integers, one per key")
    moments.add_argument("--random", type=int, default=0, help="check this many seeded assignments instead")
    moments.add_argument("--trials", type=int, default=10_000)
    moments.add_argument("--family", choices=["polykindep", "tabulation"], default="polykindep")
    moments.add_argument("--field-param", type=int, choices=[61, 89], default=61)
    moments.set_defaults(handler=ams)
