"""
Timing harness for the sampling decision at w = 64 against a 7-independent
polynomial modulo 2^89 - 1.

Keys advance by one fixed random 64-bit stride per iteration. Every subject
folds its outputs into a sink that is reported, so no loop body is dead.
"""
import logging
import platform
import random
from time import perf_counter_ns
from typing import Callable, List, Sequence, Tuple

from distinguisher.errors import ParameterSpaceError
from distinguisher.schemas import BenchReport, BenchSubject, OddMul2wSpec
from distinguisher.services import fields
from distinguisher.services.monoid import MASK64
from distinguisher.services.samplers import construct, random_odd

logger = logging.getLogger(__name__)

MIN_ITERATIONS = 10 ** 6
SAMPLER_SPOT_CHECKS = 10 ** 4
POLY_SPOT_CHECKS = 100
POLY_EXPONENT = 89
POLY_DEGREE = 6
SOFT_RATIO = 3.0


def _threshold(a: int, t: int, x: int, stride: int, iterations: int) -> int:
    sink = 0
    for _ in range(iterations):
        sink += ((a * x) & MASK64) <= t
        x = (x + stride) & MASK64
    return sink


def _shift(a: int, t: int, x: int, stride: int, iterations: int) -> int:
    sink = 0
    for _ in range(iterations):
        sink += ((a * x) & MASK64) >> 63
        x = (x + stride) & MASK64
    return sink


def _threshold_accumulate(a: int, t: int, x: int, stride: int, iterations: int) -> int:
    sink = 0
    for _ in range(iterations):
        if ((a * x) & MASK64) <= t:
            sink = (sink + x) & MASK64
        x = (x + stride) & MASK64
    return sink


def _shift_accumulate(a: int, t: int, x: int, stride: int, iterations: int) -> int:
    sink = 0
    for _ in range(iterations):
        if ((a * x) & MASK64) >> 63:
            sink = (sink + x) & MASK64
        x = (x + stride) & MASK64
    return sink


def _polynomial(coefficients: Sequence[int], x: int, stride: int, iterations: int) -> int:
    sink = 0
    for _ in range(iterations):
        sink ^= fields.mersenne_poly_eval(coefficients, x, POLY_EXPONENT)
        x = (x + stride) & MASK64
    return sink


def _timed(fn: Callable[..., int], *args) -> Tuple[int, int]:
    start = perf_counter_ns()
    sink = fn(*args)
    return perf_counter_ns() - start, sink


def _spot_check(a: int, t: int, x: int, stride: int, coefficients: Sequence[int]) -> None:
    """The timed expressions agree with the sampler and with plain big-integer evaluation."""
    sampler = construct(OddMul2wSpec(w=64, a=a, t=t))
    p = (1 << POLY_EXPONENT) - 1
    for i in range(SAMPLER_SPOT_CHECKS):
        if int(((a * x) & MASK64) <= t) != sampler.sample(x):
            raise RuntimeError(f"benchmarked threshold disagrees with the sampler at key {x}")
        if i < POLY_SPOT_CHECKS:
            direct = sum(c * x ** j for j, c in enumerate(coefficients)) % p
            if fields.mersenne_poly_eval(coefficients, x, POLY_EXPONENT) != direct:
                raise RuntimeError(f"Mersenne evaluation disagrees with big integers at key {x}")
        x = (x + stride) & MASK64


def environment() -> str:
    cpu = platform.processor() or platform.machine()
    return f"{platform.python_implementation()} {platform.python_version()}, {platform.system()} {cpu}"


def run_bench(iterations: int = 10 ** 7, seed: int = 0) -> BenchReport:
    """
    Time the five subjects for `iterations` keys each.

    Args:
        iterations: keys per subject, at least 10^6
        seed: fixes a, t, the start key, the stride and the polynomial

    Returns:
        BenchReport with absolute times and the polynomial/threshold ratio
    """
    if iterations < MIN_ITERATIONS:
        raise ParameterSpaceError(f"iterations must be at least {MIN_ITERATIONS}")
    rng = random.Random(seed)
    a = random_odd(rng, 64)
    t = rng.getrandbits(64)
    x0 = rng.getrandbits(64)
    stride = rng.getrandbits(64)
    p = (1 << POLY_EXPONENT) - 1
    coefficients = [rng.randrange(p) for _ in range(POLY_DEGREE + 1)]
    _spot_check(a, t, x0, stride, coefficients)

    plan: List[Tuple[str, Callable[..., int], tuple]] = [
        ("a*x<=t", _threshold, (a, t, x0, stride, iterations)),
        ("a*x>>63", _shift, (a, t, x0, stride, iterations)),
        ("if (a*x<=t) S+=x", _threshold_accumulate, (a, t, x0, stride, iterations)),
        ("if (a*x>>63) S+=x", _shift_accumulate, (a, t, x0, stride, iterations)),
        ("7-indep poly mod 2^89-1", _polynomial, (coefficients, x0, stride, iterations)),
    ]
    subjects, sink = [], 0
    for name, fn, args in plan:
        elapsed, out = _timed(fn, *args)
        sink = (sink + out) & MASK64
        logger.info("%s: %d ns over %d iterations", name, elapsed, iterations)
        subjects.append(
            BenchSubject(name=name, iterations=iterations, total_ns=elapsed, ns_per_op=elapsed / iterations)
        )
    ratio = subjects[-1].ns_per_op / subjects[0].ns_per_op if subjects[0].ns_per_op else 0.0
    return BenchReport(
        subjects=subjects,
        environment=environment(),
        seed=seed,
        sink=sink,
        poly_to_threshold_ratio=ratio,
        soft_ratio_ok=ratio >= SOFT_RATIO,
    )
