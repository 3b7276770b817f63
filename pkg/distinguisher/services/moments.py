"""
Second and fourth moments of X = sum v(x) * Sample(x) for 4-independent bits.

Exact mode enumerates every coefficient vector of a degree-3 polynomial over a
small GF(2^e); Monte Carlo mode draws samplers from a full-size family.
"""
import logging
import random
from fractions import Fraction
from typing import Dict, List

import numpy as np

from distinguisher.errors import ParameterSpaceError, ShapeError, UniverseError
from distinguisher.schemas import MomentReport, Universe
from distinguisher.services import fields, monoid
from distinguisher.services.distinguish import ValueAssignment
from distinguisher.services.monoid import MonoidKind
from distinguisher.services.samplers import random_sampler

logger = logging.getLogger(__name__)

MAX_EXACT_SEED_BITS = 16
MAX_EXACT_KEYS = 16
NONZERO_BOUND = Fraction(1, 3)
FOURTH_MOMENT_FACTOR = 3

MC_FAMILY_DEFAULTS = {
    "polykindep": {"field": "mersenne", "field_param": 61, "k": 4, "output_rule": "low_bit"},
    "tabulation": {"c": 2, "char_bits": 8, "r": 8},
}


def signed_values(v: ValueAssignment) -> Dict[int, int]:
    """Integer view of an assignment: F2 bits as 1, WrapInt64 as two's complement."""
    if v.tag.kind is MonoidKind.INT_VECTOR:
        raise ShapeError("moment check needs scalar values")
    if v.tag.kind is MonoidKind.F2:
        return {x: 1 for x in v.keys()}
    return {x: monoid.to_signed(val.payload) for x, val in v.items()}


def _report(mode: str, n: int, weighted: Dict[int, int], total: int, **extra) -> MomentReport:
    """Moments from a histogram {X: count} over `total` equally likely outcomes."""
    e_x2 = Fraction(sum(c * x ** 2 for x, c in weighted.items()), total)
    e_x4 = Fraction(sum(c * x ** 4 for x, c in weighted.items()), total)
    pr_nonzero = Fraction(sum(c for x, c in weighted.items() if x != 0), total)
    ratio = e_x4 / (e_x2 * e_x2) if e_x2 else Fraction(0)
    return MomentReport(
        mode=mode,
        n=n,
        e_x2=e_x2,
        e_x4=e_x4,
        ratio=ratio,
        pr_nonzero=pr_nonzero,
        fourth_moment_ok=e_x4 < FOURTH_MOMENT_FACTOR * e_x2 * e_x2,
        nonzero_ok=pr_nonzero > NONZERO_BOUND,
        **extra,
    )


def _exact_patterns(keys: List[int], e: int, k: int) -> np.ndarray:
    """Counts of every sample pattern (bit j = Sample(keys[j])) over all coefficient vectors."""
    table = fields.gf_mul_table(e)
    mask = (1 << e) - 1
    seeds = np.arange(1 << (k * e), dtype=np.int64)
    key_array = np.array(keys, dtype=np.int64)
    h = np.zeros((len(seeds), len(keys)), dtype=np.int64)
    power = np.ones(len(keys), dtype=np.int64)
    for i in range(k):
        coefficient = (seeds >> (i * e)) & mask
        h ^= table[coefficient[:, None], power[None, :]]
        power = table[power, key_array]
    bits = h & 1
    patterns = (bits << np.arange(len(keys), dtype=np.int64)).sum(axis=1)
    return np.bincount(patterns, minlength=1 << len(keys))


def exact_moments(v: ValueAssignment, e: int = 4, k: int = 4) -> MomentReport:
    values = signed_values(v)
    if not values:
        raise ParameterSpaceError("moment check needs at least one non-zero value")
    if k * e > MAX_EXACT_SEED_BITS:
        raise ParameterSpaceError(f"coefficient space 2^{k * e} exceeds 2^{MAX_EXACT_SEED_BITS}")
    if e not in fields.IRREDUCIBLE:
        raise ParameterSpaceError(f"no field GF(2^{e})")
    keys = sorted(values)
    if len(keys) > MAX_EXACT_KEYS:
        raise ParameterSpaceError(f"exact mode handles at most {MAX_EXACT_KEYS} keys")
    if keys[-1] >= 1 << e:
        raise UniverseError(f"keys must lie in GF(2^{e})")
    logger.info("enumerating 2^%d coefficient vectors over GF(2^%d) for n=%d", k * e, e, len(keys))
    counts = _exact_patterns(keys, e, k)
    weighted: Dict[int, int] = {}
    for pattern, count in enumerate(counts.tolist()):
        if count:
            x = sum(values[key] for j, key in enumerate(keys) if pattern >> j & 1)
            weighted[x] = weighted.get(x, 0) + count
    return _report("exact_gf2e", len(keys), weighted, 1 << (k * e), seed_space=1 << (k * e))


def montecarlo_moments(v: ValueAssignment, trials: int, seed: int, family: str = "polykindep", **params) -> MomentReport:
    values = signed_values(v)
    if not values:
        raise ParameterSpaceError("moment check needs at least one non-zero value")
    if trials < 1:
        raise ParameterSpaceError("trials must be positive")
    if family not in MC_FAMILY_DEFAULTS:
        raise ParameterSpaceError(f"family must be one of {sorted(MC_FAMILY_DEFAULTS)}")
    params = {**MC_FAMILY_DEFAULTS[family], **params}
    rng = random.Random(seed)
    weighted: Dict[int, int] = {}
    for _ in range(trials):
        sampler = random_sampler(family, rng.getrandbits(64), **params)
        x = sum(val for key, val in values.items() if sampler.sample(key))
        weighted[x] = weighted.get(x, 0) + 1
    return _report("montecarlo", len(values), weighted, trials, trials=trials, seed=seed)


def ams_moment_check(v: ValueAssignment, mode: str = "exact_gf2e", **kwargs) -> MomentReport:
    """
    E[X^2], E[X^4] and Pr[X != 0], flagging E[X^4] < 3 E[X^2]^2 and Pr[X != 0] > 1/3.

    Args:
        v: non-empty F2 or WrapInt64 assignment (WrapInt64 read as signed)
        mode: exact_gf2e (kwargs e, k) or montecarlo (kwargs trials, seed,
            family and its size parameters)
    """
    if mode == "exact_gf2e":
        return exact_moments(v, **kwargs)
    if mode == "montecarlo":
        return montecarlo_moments(v, **kwargs)
    raise ParameterSpaceError(f"unknown moment mode '{mode}'")


def random_assignments(count: int, seed: int, e: int = 4, max_n: int = 6, max_abs: int = 3) -> List[ValueAssignment]:
    """Seeded WrapInt64 assignments on GF(2^e) keys with non-zero values in [-max_abs, max_abs]."""
    rng = random.Random(seed)
    choices = [c for c in range(-max_abs, max_abs + 1) if c]
    universe = Universe.power_of_two(e)
    out = []
    for _ in range(count):
        n = rng.randint(1, min(max_n, 1 << e))
        keys = rng.sample(range(1 << e), n)
        out.append(ValueAssignment.from_raw(universe, monoid.WRAP_INT64, {x: rng.choice(choices) for x in keys}))
    return out
