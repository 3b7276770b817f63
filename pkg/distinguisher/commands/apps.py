"""freivald, stream-test, tree-test and smallbias."""
import argparse

from distinguisher.commands import common_parser, int_list, read_assignment
from distinguisher.deps import render, resolve_seed
from distinguisher.errors import InputFormatError, ParameterSpaceError
from distinguisher.schemas import CommandResult, Universe
from distinguisher.services import apps, monoid
from distinguisher.services.distinguish import parse_stream, samplers_for_epsilon
from distinguisher.services.verify import small_bias_check


def freivald(args: argparse.Namespace) -> CommandResult:
    try:
        a, b, c = apps.load_matrix(args.a), apps.load_matrix(args.b), apps.load_matrix(args.c)
        verdict = apps.freivald_verify(a, b, c, args.rounds, resolve_seed(args.seed))
        return CommandResult(ok=True, data=[verdict], text=render("apps.txt.j2", kind="freivald", r=verdict))
    except ValueError as e:
        return CommandResult(ok=False, error=f"Freivald check failed: {e}")


def stream_test(args: argparse.Namespace) -> CommandResult:
    try:
        universe = Universe.power_of_two(args.w)
        claimed = read_assignment(args.claim, universe, args.monoid)
        tag = monoid.parse_tag(args.monoid)
        try:
            with open(args.stream, "r") as f:
                result = apps.stream_equal_test(parse_stream(f, tag), claimed, args.d, resolve_seed(args.seed))
        except OSError as e:
            raise InputFormatError(f"cannot read {args.stream}: {e}")
        text = render("apps.txt.j2", kind="stream", r=result, zipped=list(zip(result.digests, result.claimed)))
        return CommandResult(ok=True, data=[result], text=text)
    except ValueError as e:
        return CommandResult(ok=False, error=f"Stream test failed: {e}")


def tree_test(args: argparse.Namespace) -> CommandResult:
    try:
        result = apps.tree_edge_test(apps.load_graph(args.graph), args.d, resolve_seed(args.seed))
        return CommandResult(ok=True, data=[result], text=render("apps.txt.j2", kind="tree", r=result))
    except ValueError as e:
        return CommandResult(ok=False, error=f"Tree test failed: {e}")


def smallbias(args: argparse.Namespace) -> CommandResult:
    try:
        if args.epsilon is not None:
            d = samplers_for_epsilon(args.epsilon)
        elif args.d is not None:
            d = args.d
        else:
            raise ParameterSpaceError("give --d or --epsilon")
        report = small_bias_check(args.keys, d, args.draws, resolve_seed(args.seed), w=args.w)
        failed = 0 if report.holds else 1
        return CommandResult(
            ok=True, data=[report], failed_checks=failed, text=render("apps.txt.j2", kind="smallbias", r=report)
        )
    except ValueError as e:
        return CommandResult(ok=False, error=f"Small-bias check failed: {e}")


def register(subparsers) -> None:
    common = common_parser()

    fv = subparsers.add_parser("freivald", parents=[common], help="verify a matrix product AB = C")
    fv.add_argument("--a", required=True, help="matrix file A")
    fv.add_argument("--b", required=True, help="matrix file B")
    fv.add_argument("--c", required=True, help="matrix file C")
    fv.add_argument("--rounds", type=int, default=64)
    fv.set_defaults(handler=freivald)

    st = subparsers.add_parser("stream-test", parents=[common], help="compare a stream with a claimed assignment")
    st.add_argument("--stream", required=True, help="file of '<key> <value>' updates")
    st.add_argument("--claim", required=True, help="claimed assignment, same line format")
    st.add_argument("--monoid", default="f2")
    st.add_argument("--w", type=int, default=32, help="keys live in [2^w]")
    st.add_argument("--d", type=int, default=32, help="number of samplers")
    st.set_defaults(handler=stream_test)

    tt = subparsers.add_parser("tree-test", parents=[common], help="detect an edge leaving a vertex set")
    tt.add_argument("--graph", required=True, help="graph file: 'V E', E edge lines, then T")
    tt.add_argument("--d", type=int, default=64, help="number of samplers")
    tt.set_defaults(handler=tree_test)

    sb = subparsers.add_parser("smallbias", parents=[common], help="empirical bias of the composed sampling bit")
    sb.add_argument("--d", type=int, default=None, help="number of samplers")
    sb.add_argument("--epsilon", type=float, default=None, help="derive d from a target bias")
    sb.add_argument("--keys", type=int_list, default=[0, 1, 2])
    sb.add_argument("--draws", type=int, default=100_000)
    sb.add_argument("--w", type=int, default=8, help="word size of the samplers")
    sb.set_defaults(handler=smallbias)
