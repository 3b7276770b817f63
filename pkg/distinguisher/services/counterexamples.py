"""
Executable refutations: sampling schemes that look random but fail to
distinguish, each measured exactly.
"""
import logging
import random
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Dict, List, Sequence, Tuple

import numpy as np

from distinguisher.errors import ParameterSpaceError
from distinguisher.schemas import (
    CounterexampleReport,
    CounterexampleResult,
    MulShiftSpec,
    ParityConstrainedSpec,
    Prop2CounterexampleSpec,
    TabulationSpec,
    Universe,
)
from distinguisher.services import monoid
from distinguisher.services.distinguish import ValueAssignment, sampled_sum
from distinguisher.services.samplers import construct, random_spec

logger = logging.getLogger(__name__)

MAX_PARITY_U = 16
MSB_PAIR_W = 8


def msb_pairs(x: int, y: int, w: int = MSB_PAIR_W) -> List[int]:
    """{x, x + 2^(w-1), y, y + 2^(w-1)} for x, y in [2^(w-1)]."""
    half = 1 << (w - 1)
    if not (0 <= x < half and 0 <= y < half) or x == y:
        raise ParameterSpaceError(f"x and y must be distinct and below {half}")
    return sorted([x, x + half, y, y + half])


def parity_refutation(u: int = 4) -> CounterexampleResult:
    """Every even-parity bit vector gives the all-ones F2 assignment sum 0."""
    if not 2 <= u <= MAX_PARITY_U:
        raise ParameterSpaceError(f"u must be in 2..{MAX_PARITY_U}")
    v = ValueAssignment.ones(Universe.of_range(u), range(u))
    nonzero = total = 0
    for head in product("01", repeat=u - 1):
        bits = "".join(head) + str(head.count("1") % 2)
        sampler = construct(ParityConstrainedSpec(u=u, bits=bits))
        total += 1
        if not monoid.is_zero(sampled_sum(sampler, v)):
            nonzero += 1
    probability = Fraction(nonzero, total)
    return CounterexampleResult(
        name="parity",
        claim="a uniform even-parity sample never distinguishes the all-ones F2 assignment",
        probability=probability,
        expected=Fraction(0),
        holds=probability == 0,
        details={"u": u, "vectors": total},
    )


def mulshift_refutation(x: int = 1, y: int = 2) -> CounterexampleResult:
    """(a*x) >> (w-1) samples an even number of the MSB-pair keys for every a."""
    w = MSB_PAIR_W
    keys = msb_pairs(x, y, w)
    v = ValueAssignment.ones(Universe.power_of_two(w), keys)
    nonzero = 0
    for a in range(1 << w):
        if not monoid.is_zero(sampled_sum(construct(MulShiftSpec(w=w, a=a)), v)):
            nonzero += 1
    probability = Fraction(nonzero, 1 << w)
    return CounterexampleResult(
        name="mulshift",
        claim="universal multiply-shift to one bit is not a distinguisher",
        probability=probability,
        expected=Fraction(0),
        holds=probability == 0,
        details={"w": w, "keys": keys, "multipliers": 1 << w},
    )


def fixed_threshold_refutation(x: int = 1, y: int = 2) -> CounterexampleResult:
    """[(a*x + b) mod 2^w <= 2^(w-1) - 1] for every a and b: the threshold must be random."""
    w = MSB_PAIR_W
    m = 1 << w
    keys = np.array(msb_pairs(x, y, w), dtype=np.int64)
    a, b = np.divmod(np.arange(m * m, dtype=np.int64), m)
    sampled = ((a[:, None] * keys[None, :] + b[:, None]) & (m - 1)) <= (m // 2 - 1)
    nonzero = int((sampled.sum(axis=1) % 2).sum())
    probability = Fraction(nonzero, m * m)
    return CounterexampleResult(
        name="fixed-threshold",
        claim="a fixed half-range threshold never distinguishes the MSB-pair set",
        probability=probability,
        expected=Fraction(0),
        holds=probability == 0,
        details={"w": w, "keys": keys.tolist(), "seeds": m * m},
    )


def _square_keys(a: int, b: int, char_bits: int) -> List[int]:
    """Two-character keys aa, ab, ba, bb with x = x0 + x1 * 2^char_bits."""
    return [x0 + (x1 << char_bits) for x0, x1 in ((a, a), (a, b), (b, a), (b, b))]


def tabulation_refutation(trials: int = 10_000, seed: int = 0) -> CounterexampleResult:
    """
    Simple tabulation with two characters sums to zero on {aa, ab, ba, bb}.

    All 16 fills of 1-bit tables over a 2-letter alphabet are enumerated, then
    `trials` random 8-bit tables over 8-bit characters with random a != b.
    """
    nonzero = total = 0
    universe = Universe.power_of_two(2)
    v = ValueAssignment.ones(universe, _square_keys(0, 1, 1))
    for fill in product((0, 1), repeat=4):
        spec = TabulationSpec(c=2, char_bits=1, r=1, tables=[list(fill[:2]), list(fill[2:])])
        total += 1
        if not monoid.is_zero(sampled_sum(construct(spec), v)):
            nonzero += 1
    exhaustive = total
    rng = random.Random(seed)
    universe = Universe.power_of_two(16)
    for _ in range(trials):
        sampler = construct(random_spec("tabulation", rng.getrandbits(64), c=2, char_bits=8, r=8))
        a, b = rng.sample(range(256), 2)
        v = ValueAssignment.ones(universe, _square_keys(a, b, 8))
        total += 1
        if not monoid.is_zero(sampled_sum(sampler, v)):
            nonzero += 1
    probability = Fraction(nonzero, total)
    return CounterexampleResult(
        name="tabulation",
        claim="two-character simple tabulation cancels on the four-key square",
        probability=probability,
        expected=Fraction(0),
        holds=probability == 0,
        details={"exhaustive_fills": exhaustive, "random_tables": trials, "seed": seed},
    )


def prop2_class_masses(n: int) -> Dict[Tuple[str, str], Fraction]:
    """Mass of each (positive, negative) outcome class: none and all get 1/(4n) each."""
    eps = Fraction(1, 4 * n)
    single = {"none": eps, "all": eps, "balanced": 1 - 2 * eps}
    return {(p, q): single[p] * single[q] for p, q in product(single, repeat=2)}


def prop2_nonzero_closed_form(n: int) -> Fraction:
    eps = Fraction(1, 4 * n)
    return 4 * eps - 6 * eps * eps


def _prop2_outcomes(n: int) -> List[Tuple[str, List[int], Fraction]]:
    """Every outcome of one half: (outcome, subset, probability)."""
    eps = Fraction(1, 4 * n)
    balanced = comb(2 * n, n)
    outcomes = [("none", [], eps), ("all", [], eps)]
    for subset in combinations(range(2 * n), n):
        outcomes.append(("balanced", list(subset), (1 - 2 * eps) / balanced))
    return outcomes


def prop2_refutation(n: int) -> CounterexampleResult:
    """
    A 2-independent sampler over the reals that almost never distinguishes.

    Keys [0, 2n) carry +1 and [2n, 4n) carry -1. Every (positive, negative)
    half outcome is enumerated through the real sampler; the non-zero mass is
    compared with the class-mass closed form 4e - 6e^2 (e = 1/u), and the
    marginals and pair probabilities with 1/2 and 1/4.
    """
    if not 1 <= n <= 4:
        raise ParameterSpaceError("full enumeration is kept to n <= 4")
    u = 4 * n
    values = {x: 1 if x < 2 * n else -1 for x in range(u)}
    v = ValueAssignment.from_raw(Universe.of_range(u), monoid.WRAP_INT64, values)
    nonzero = Fraction(0)
    marginal = [Fraction(0)] * u
    pair = {(i, j): Fraction(0) for i, j in combinations(range(u), 2)}
    outcomes = _prop2_outcomes(n)
    for (pos, pos_subset, p_mass), (neg, neg_subset, q_mass) in product(outcomes, repeat=2):
        spec = Prop2CounterexampleSpec(
            n=n, positive_outcome=pos, negative_outcome=neg, positive_subset=pos_subset, negative_subset=neg_subset
        )
        sampler = construct(spec)
        mass = p_mass * q_mass
        if not monoid.is_zero(sampled_sum(sampler, v)):
            nonzero += mass
        sampled = [x for x in range(u) if sampler.sample(x)]
        for x in sampled:
            marginal[x] += mass
        for i, j in combinations(sampled, 2):
            pair[(i, j)] += mass
    closed = prop2_nonzero_closed_form(n)
    class_total = sum(
        mass for (p, q), mass in prop2_class_masses(n).items() if p != q
    )
    marginals_ok = all(m == Fraction(1, 2) for m in marginal)
    pairs_ok = all(p == Fraction(1, 4) for p in pair.values())
    bound = Fraction(4, u)
    holds = nonzero == closed == class_total and marginals_ok and pairs_ok and nonzero <= bound
    logger.info("prop2 n=%d: Pr[non-zero] = %s", n, nonzero)
    return CounterexampleResult(
        name=f"prop2-n{n}",
        claim="a 2-independent sampler with Pr[non-zero sum] <= 4/u",
        probability=nonzero,
        expected=closed,
        holds=holds,
        details={
            "u": u,
            "bound": f"{bound.numerator}/{bound.denominator}",
            "marginals_half": marginals_ok,
            "pairs_quarter": pairs_ok,
            "outcomes": len(outcomes) ** 2,
        },
    )


def counterexample_suite(
    parity_u: int = 4,
    msb_keys: Sequence[int] = (1, 2),
    tabulation_trials: int = 10_000,
    prop2_ns: Sequence[int] = (2, 3, 4),
    seed: int = 0,
) -> CounterexampleReport:
    x, y = msb_keys
    results = [
        parity_refutation(parity_u),
        mulshift_refutation(x, y),
        tabulation_refutation(tabulation_trials, seed),
    ]
    results += [prop2_refutation(n) for n in prop2_ns]
    results.append(fixed_threshold_refutation(x, y))
    return CounterexampleReport(results=results)
