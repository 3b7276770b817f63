"""verify-exhaustive and verify-mc."""
import argparse

from distinguisher.commands import add_assignment_source, assignments_for, common_parser
from distinguisher.deps import render, resolve_seed, resolve_workers
from distinguisher.errors import ParameterSpaceError
from distinguisher.schemas import CommandResult, Universe
from distinguisher.services.distinguish import ValueAssignment
from distinguisher.services.verify import exhaustive_prob, fully_random_baseline, mc_prob

AFFINE_MAX_N = 32


def _universe(scheme: str, args: argparse.Namespace) -> Universe:
    if scheme in ("oddmul2w", "mulshift"):
        if args.w is None:
            raise ParameterSpaceError(f"--w is required for {scheme}")
        return Universe.power_of_two(args.w)
    if args.p is None:
        raise ParameterSpaceError(f"--p is required for {scheme}")
    return Universe.prime(args.p)


def verify_exhaustive(args: argparse.Namespace) -> CommandResult:
    """Exact probabilities for every assignment of the corpus (or one file)."""
    try:
        workers = resolve_workers(args.workers)
        if args.scheme == "fullyrandom":
            if args.u is None:
                raise ParameterSpaceError("--u is required for fullyrandom")
            universe = Universe.of_range(args.u)
            if args.assignment is None:
                sources = [(f"all-ones-{args.u}", ValueAssignment.ones(universe, range(args.u)))]
            else:
                sources = assignments_for(args, universe)
            reports = [fully_random_baseline(v, args.reject_empty) for _, v in sources]
            reports = [r.model_copy(update={"label": label}) for r, (label, _) in zip(reports, sources)]
        else:
            universe = _universe(args.scheme, args)
            max_n = AFFINE_MAX_N if args.scheme == "affine2indep" else None
            size = universe.param
            reports = [
                exhaustive_prob(args.scheme, size, v, workers=workers, label=label)
                for label, v in assignments_for(args, universe, max_n)
            ]
        failed = sum(1 for r in reports if not r.holds)
        text = render(
            "reports.txt.j2",
            title=f"exhaustive {args.scheme} on universe {universe.size}",
            method="exhaustive",
            reports=reports,
        )
        return CommandResult(ok=True, data=reports, failed_checks=failed, text=text)
    except ValueError as e:
        return CommandResult(ok=False, error=f"Exhaustive verification failed: {e}")


def verify_mc(args: argparse.Namespace) -> CommandResult:
    """Monte Carlo estimates with 99% Wilson intervals at full word size."""
    try:
        seed = resolve_seed(args.seed)
        universe = _universe(args.scheme, args)
        reports = [
            mc_prob(args.scheme, v, args.trials, seed, label=label)
            for label, v in assignments_for(args, universe)
        ]
        failed = sum(1 for r in reports if not r.holds)
        text = render(
            "reports.txt.j2",
            title=f"Monte Carlo {args.scheme}, {args.trials} trials, seed {seed}",
            method="montecarlo",
            reports=reports,
        )
        return CommandResult(ok=True, data=reports, failed_checks=failed, text=text)
    except ValueError as e:
        return CommandResult(ok=False, error=f"Monte Carlo verification failed: {e}")


def register(subparsers) -> None:
    common = common_parser()

    exhaustive = subparsers.add_parser(
        "verify-exhaustive", parents=[common], help="exact probability over every hash seed"
    )
    exhaustive.add_argument(
        "--scheme", required=True, choices=["oddmul2w", "modprime", "affine2indep", "fullyrandom"]
    )
    exhaustive.add_argument("--w", type=int, help="word size for oddmul2w")
    exhaustive.add_argument("--p", type=int, help="prime for modprime / affine2indep")
    exhaustive.add_argument("--u", type=int, help="universe size for fullyrandom")
    exhaustive.add_argument("--reject-empty", action="store_true", help="fullyrandom never samples nothing")
    add_assignment_source(exhaustive)
    exhaustive.set_defaults(handler=verify_exhaustive)

    mc = subparsers.add_parser("verify-mc", parents=[common], help="Monte Carlo estimate with confidence interval")
    mc.add_argument("--scheme", required=True, choices=["oddmul2w", "modprime", "affine2indep", "mulshift"])
    mc.add_argument("--w", type=int, default=None, help="word size (oddmul2w, mulshift)")
    mc.add_argument("--p", type=int, default=None, help="prime (modprime, affine2indep)")
    mc.add_argument("--trials", type=int, default=10_000)
    add_assignment_source(mc)
    mc.set_defaults(handler=verify_mc)
