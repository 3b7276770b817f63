"""
Exact and Monte Carlo verification of the threshold distinguishers.

Exhaustive results enumerate every hash seed and measure the good threshold
intervals exactly, so no asserted inequality ever touches floating point.
"""
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from distinguisher.errors import ConstructionError, ParameterSpaceError, UniverseError
from distinguisher.schemas import DistinguishReport, LemmaCheckResult, SmallBiasReport, SweepResult
from distinguisher.services import fields, monoid
from distinguisher.services.distinguish import (
    MISS_PROBABILITY,
    ValueAssignment,
    VectorSampler,
    good_counts_batch,
    sampled_sum,
    small_bias_bit,
)
from distinguisher.services.samplers import random_sampler, size_params_for

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_W = 16
MAX_EXHAUSTIVE_PRIME = 1 << 14
MAX_LEMMA_W = 12
MAX_BASELINE_U = 16
MIN_MC_TRIALS = 100
WILSON_Z = 2.576
# hash cells evaluated per numpy block
BLOCK_CELLS = 1 << 20
MAX_LENGTH_CELLS = 1 << 24

DISTINGUISHER_BOUND = Fraction(1, 8)


def threshold_space(scheme: str, size: int) -> Tuple[int, int]:
    """
    (m, number of hash seeds) of an enumerable threshold scheme.

    Args:
        scheme: oddmul2w, modprime or affine2indep
        size: w for oddmul2w, p otherwise

    Raises:
        ParameterSpaceError: if the seed space is too large to enumerate
    """
    if scheme == "oddmul2w":
        if not 1 <= size <= MAX_EXHAUSTIVE_W:
            raise ParameterSpaceError(f"exhaustive oddmul2w needs 1 <= w <= {MAX_EXHAUSTIVE_W}, got {size}")
        return 1 << size, 1 << (size - 1)
    if scheme in ("modprime", "affine2indep"):
        if size > MAX_EXHAUSTIVE_PRIME:
            raise ParameterSpaceError(f"exhaustive {scheme} needs p <= {MAX_EXHAUSTIVE_PRIME}, got {size}")
        if not fields.is_prime(size):
            raise ConstructionError(f"modulus {size} must be prime")
        if scheme == "modprime":
            return size, size - 1
        return size, size * size
    raise ParameterSpaceError(f"scheme '{scheme}' has no exhaustive mode")


def seed_hashes(scheme: str, m: int, seeds: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """
    Hash values of `keys` under the seeds with the given indices.

    Seed index i is a = 2i + 1 for oddmul2w, a = i + 1 for modprime and
    (a, b) = divmod(i, p) for affine2indep. Returns int64 (len(seeds), len(keys)).
    """
    seeds = seeds.astype(np.int64)
    keys = keys.astype(np.int64)
    if scheme == "oddmul2w":
        return ((2 * seeds + 1)[:, None] * keys[None, :]) & (m - 1)
    if scheme == "modprime":
        return ((seeds + 1)[:, None] * keys[None, :]) % m
    a, b = np.divmod(seeds, m)
    return (a[:, None] * keys[None, :] + b[:, None]) % m


def _good_total_chunk(scheme: str, m: int, start: int, stop: int, v: ValueAssignment) -> int:
    keys = np.array(v.keys(), dtype=np.int64)
    rows = max(1, BLOCK_CELLS // max(1, len(keys)))
    total = 0
    for lo in range(start, stop, rows):
        block = np.arange(lo, min(stop, lo + rows), dtype=np.int64)
        hashes = seed_hashes(scheme, m, block, keys)
        total += int(good_counts_batch(hashes, m, v).sum())
    return total


def _partition(count: int, parts: int) -> List[Tuple[int, int]]:
    parts = max(1, min(parts, count))
    step, extra = divmod(count, parts)
    bounds, lo = [], 0
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def good_total(scheme: str, size: int, v: ValueAssignment, workers: int = 1) -> Tuple[int, int]:
    """
    Sum of |GOOD^h| over every hash seed, and the unreduced denominator seeds * m.

    The seed range is split into contiguous chunks, one per worker; the chunk
    totals are integers, so the result does not depend on the worker count.
    """
    if v.n == 0:
        raise ParameterSpaceError("exhaustive probability needs a non-empty assignment")
    m, seeds = threshold_space(scheme, size)
    if v.universe.size != m:
        raise UniverseError(f"assignment universe {v.universe.size} differs from hash range {m}")
    chunks = _partition(seeds, workers)
    logger.info("enumerating %d %s seeds for n=%d on %d worker(s)", seeds, scheme, v.n, len(chunks))
    if len(chunks) == 1:
        total = _good_total_chunk(scheme, m, 0, seeds, v)
    else:
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(_good_total_chunk, scheme, m, lo, hi, v) for lo, hi in chunks]
            total = sum(f.result() for f in futures)
    logger.info("enumeration of %s done: good total %d", scheme, total)
    return total, seeds * m


def distinguisher_bound(scheme: str, m: int, n: int) -> Fraction:
    """1/8 for the odd-multiply and mod-p schemes, (1 - n^2/m^2)/8 for affine."""
    if scheme == "affine2indep":
        return (1 - Fraction(n * n, m * m)) / 8
    return DISTINGUISHER_BOUND


def exhaustive_prob(
    scheme: str, size: int, v: ValueAssignment, workers: int = 1, label: Optional[str] = None
) -> DistinguishReport:
    """
    Exact Pr over every hash seed and uniform t that the sampled sum is non-zero.

    Computed as the sum of |GOOD^h| over all seeds divided by seeds * m;
    thresholds are never iterated.

    Args:
        scheme: oddmul2w, modprime or affine2indep
        size: w for oddmul2w (<= 16), p for the prime schemes (<= 2^14)
        v: non-empty assignment on the scheme's universe
        workers: process-pool width
        label: optional name carried into the report

    Returns:
        DistinguishReport with the exact probability and the scheme's bound
    """
    total, denominator = good_total(scheme, size, v, workers)
    probability = Fraction(total, denominator)
    bound = distinguisher_bound(scheme, v.universe.size, v.n)
    return DistinguishReport(
        method="exhaustive",
        scheme=scheme,
        universe_size=v.universe.size,
        monoid=v.tag.name,
        n=v.n,
        probability=probability,
        good_total=total,
        denominator=denominator,
        bound=bound,
        holds=probability >= bound,
        label=label,
    )


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> Tuple[float, float]:
    """Two-sided Wilson score interval with continuity correction."""
    n = trials
    p_hat = successes / n
    z2 = z * z
    denom = 2 * (n + z2)
    if successes == 0:
        low = 0.0
    else:
        spread = z * math.sqrt(z2 - 2 - 1 / n + 4 * p_hat * (n * (1 - p_hat) + 1))
        low = (2 * n * p_hat + z2 - 1 - spread) / denom
    if successes == n:
        high = 1.0
    else:
        spread = z * math.sqrt(z2 + 2 - 1 / n + 4 * p_hat * (n * (1 - p_hat) - 1))
        high = (2 * n * p_hat + z2 + 1 + spread) / denom
    return max(0.0, low), min(1.0, high)


def mc_prob(
    scheme: str, v: ValueAssignment, trials: int, seed: int, label: Optional[str] = None, **params
) -> DistinguishReport:
    """
    Monte Carlo estimate of Pr[sampled sum != 0] with a 99% Wilson interval.

    Every trial draws a fresh sampler through random_spec from a per-trial seed
    of one seeded generator. Size parameters default to the ones matching the
    assignment's universe.

    `holds` is False only when the whole interval lies below the bound.
    """
    if trials < MIN_MC_TRIALS:
        raise ParameterSpaceError(f"Monte Carlo needs at least {MIN_MC_TRIALS} trials")
    if not params:
        params = size_params_for(v.universe, scheme)
    rng = random.Random(seed)
    successes = 0
    for _ in range(trials):
        sampler = random_sampler(scheme, rng.getrandbits(64), **params)
        if not monoid.is_zero(sampled_sum(sampler, v)):
            successes += 1
    low, high = wilson_interval(successes, trials)
    bound = distinguisher_bound(scheme, v.universe.size, v.n)
    logger.info("%s Monte Carlo: %d/%d non-zero", scheme, successes, trials)
    return DistinguishReport(
        method="montecarlo",
        scheme=scheme,
        universe_size=v.universe.size,
        monoid=v.tag.name,
        n=v.n,
        probability=Fraction(successes, trials),
        ci_low=low,
        ci_high=high,
        trials=trials,
        seed=seed,
        bound=bound,
        holds=high >= bound,
        label=label,
    )


def _circular_distances(w: int, z: np.ndarray) -> np.ndarray:
    """|a*z| mod 2^w for every odd a; shape (len(z), 2^(w-1))."""
    m = 1 << w
    odd = 2 * np.arange(1 << (w - 1), dtype=np.int64) + 1
    r = (z.astype(np.int64)[:, None] * odd[None, :]) & (m - 1)
    return np.minimum(r, m - r)


def good_sum_bound(w: int, k: int) -> Fraction:
    return Fraction(4 * (k // 2) * ((k + 1) // 2), 1 << w)


def check_good_sum_lemma(w: int, z: int, k: int) -> LemmaCheckResult:
    """
    sum over delta = 1..k of Pr_a[|a*z| mod 2^w < delta] against
    2^(2-w) * floor(k/2) * ceil(k/2), exactly, over all odd a.

    Swapping the sums, the left side is sum_a max(0, k - |a*z|) / 2^(w-1).
    """
    if not 1 <= w <= MAX_LEMMA_W:
        raise ParameterSpaceError(f"w must be in 1..{MAX_LEMMA_W}")
    m = 1 << w
    if not 1 <= z < m:
        raise ParameterSpaceError("z must lie in [1, 2^w)")
    if not 1 <= k <= m:
        raise ParameterSpaceError("k must lie in [1, 2^w]")
    distances = _circular_distances(w, np.array([z]))[0]
    count = int(np.maximum(0, k - distances).sum())
    lhs = Fraction(count, 1 << (w - 1))
    bound = good_sum_bound(w, k)
    return LemmaCheckResult(
        name="good-sum",
        parameters={"w": w, "z": z, "k": k},
        lhs=lhs,
        bound=bound,
        direction="upper",
        holds=lhs <= bound,
    )


def sweep_good_sum_lemma(w: int) -> SweepResult:
    """
    The good-sum inequality for every z in [1, 2^w) and every k in [1, 2^w].

    Per z, the histogram c[d] of distances |a*z| gives the left side for all k
    at once: N(k) = k * C(k) - D(k) with C, D the counts and distance sums below k.
    """
    if not 2 <= w <= MAX_LEMMA_W:
        raise ParameterSpaceError(f"sweep needs w in 2..{MAX_LEMMA_W}")
    m = 1 << w
    z = np.arange(1, m, dtype=np.int64)
    distances = _circular_distances(w, z)
    width = m + 1
    flat = (np.arange(m - 1, dtype=np.int64)[:, None] * width + distances).ravel()
    hist = np.bincount(flat, minlength=(m - 1) * width).reshape(m - 1, width)
    below = np.cumsum(hist, axis=1)[:, :m]
    weighted = np.cumsum(hist * np.arange(width, dtype=np.int64), axis=1)[:, :m]
    k = np.arange(1, m + 1, dtype=np.int64)
    count = k[None, :] * below - weighted
    # lhs <= bound  <=>  count <= 2 * floor(k/2) * ceil(k/2)
    limit = 2 * (k // 2) * ((k + 1) // 2)
    bad = count > limit[None, :]
    violations = int(bad.sum())
    first = None
    if violations:
        zi, ki = np.argwhere(bad)[0]
        first = check_good_sum_lemma(w, int(z[zi]), int(k[ki]))
    logger.info("good-sum sweep w=%d: %d violations", w, violations)
    return SweepResult(
        name="good-sum",
        parameters={"w": w},
        checked=int(bad.size),
        violations=violations,
        first_violation=first,
    )


def neighbor_lengths(hashes: np.ndarray, m: int, plus: bool) -> np.ndarray:
    """
    Lower bounds on the good interval next to each key, for a block of seeds.

    Keys sorted by (hash, column) split [m) into I_0..I_n. The key at sorted
    position i has neighbors I_i and I_(i+1); its length is the smaller one,
    except that with `plus` the first key uses its right neighbor only.
    Returned columns are aligned with the input columns.
    """
    rows, n = hashes.shape
    order = np.argsort(hashes, axis=1, kind="stable")
    sorted_hashes = np.take_along_axis(hashes, order, axis=1)
    edges = np.concatenate(
        [np.zeros((rows, 1), dtype=np.int64), sorted_hashes, np.full((rows, 1), m, dtype=np.int64)], axis=1
    )
    intervals = np.diff(edges, axis=1)
    left, right = intervals[:, :-1], intervals[:, 1:]
    lengths_sorted = np.minimum(left, right)
    if plus:
        lengths_sorted[:, 0] = right[:, 0]
    lengths = np.empty_like(lengths_sorted)
    np.put_along_axis(lengths, order, lengths_sorted, axis=1)
    return lengths


def _all_seed_lengths(scheme: str, size: int, keys: Sequence[int]) -> Tuple[int, np.ndarray, List[int]]:
    m, seeds = threshold_space(scheme, size)
    if seeds * len(keys) > MAX_LENGTH_CELLS:
        raise ParameterSpaceError(f"{seeds} seeds x {len(keys)} keys is too large to tabulate")
    ordered = sorted(set(keys))
    if len(ordered) != len(keys):
        raise ParameterSpaceError("key set must not repeat keys")
    if not ordered or ordered[0] < 0 or ordered[-1] >= m:
        raise UniverseError(f"keys must be a non-empty subset of [{m}]")
    hashes = seed_hashes(scheme, m, np.arange(seeds), np.array(ordered))
    return m, neighbor_lengths(hashes, m, plus=scheme != "affine2indep"), ordered


def tail_bound(scheme: str, m: int, n: int, delta: int) -> Fraction:
    if scheme == "affine2indep":
        return 1 - Fraction(n * (2 * delta - 1), m)
    return 1 - Fraction(2 * n * (delta - 1), m - 1)


def check_tail_bounds(scheme: str, p: int, keys: Sequence[int], x: int, delta: int) -> LemmaCheckResult:
    """
    Exact Pr over all seeds that the interval next to h(x) has length >= delta.

    affine2indep uses the two-sided length and the bound 1 - n(2 delta - 1)/p;
    modprime drops the lower end and uses 1 - 2n(delta - 1)/(p - 1).
    """
    if scheme not in ("affine2indep", "modprime"):
        raise ParameterSpaceError("tail bounds are stated for affine2indep and modprime")
    if delta < 1:
        raise ParameterSpaceError("delta must be positive")
    m, lengths, ordered = _all_seed_lengths(scheme, p, keys)
    if x not in ordered:
        raise ParameterSpaceError(f"key {x} is not in the key set")
    column = lengths[:, ordered.index(x)]
    lhs = Fraction(int((column >= delta).sum()), len(column))
    bound = tail_bound(scheme, m, len(ordered), delta)
    return LemmaCheckResult(
        name=f"tail-{scheme}",
        parameters={"p": p, "keys": ordered, "x": x, "delta": delta},
        lhs=lhs,
        bound=bound,
        direction="lower",
        holds=lhs >= bound,
    )


def sweep_tail_bounds(scheme: str, p: int, max_set: int = 3, max_delta: int = 8) -> SweepResult:
    """The tail bound for every key set of size <= max_set, every x in it and every delta <= max_delta."""
    if max_set < 1 or max_delta < 1:
        raise ParameterSpaceError("max_set and max_delta must be positive")
    if scheme not in ("affine2indep", "modprime"):
        raise ParameterSpaceError("tail bounds are stated for affine2indep and modprime")
    checked = violations = 0
    first = None
    for size in range(1, max_set + 1):
        for keys in combinations(range(p), size):
            m, lengths, ordered = _all_seed_lengths(scheme, p, keys)
            seeds = lengths.shape[0]
            for j, x in enumerate(ordered):
                column = lengths[:, j]
                for delta in range(1, max_delta + 1):
                    checked += 1
                    lhs = Fraction(int((column >= delta).sum()), seeds)
                    if lhs < tail_bound(scheme, m, size, delta):
                        violations += 1
                        if first is None:
                            first = check_tail_bounds(scheme, p, keys, x, delta)
    logger.info("tail sweep %s p=%d: %d checks, %d violations", scheme, p, checked, violations)
    return SweepResult(
        name=f"tail-{scheme}",
        parameters={"p": p, "max_set": max_set, "max_delta": max_delta},
        checked=checked,
        violations=violations,
        first_violation=first,
    )


def expected_gap_bound(scheme: str, m: int, n: int) -> Fraction:
    if scheme == "affine2indep":
        return (Fraction(m, n) - Fraction(n, m)) / 4
    return Fraction(m, 4 * n)


def check_expected_gap(scheme: str, size: int, keys: Sequence[int], x: int) -> LemmaCheckResult:
    """
    Exact expected interval length next to h(x) over all seeds.

    Bounds: (m/n - n/m)/4 for affine2indep, strictly above p/(4n) for
    modprime and 2^w/(4n) for oddmul2w.
    """
    m, lengths, ordered = _all_seed_lengths(scheme, size, keys)
    if x not in ordered:
        raise ParameterSpaceError(f"key {x} is not in the key set")
    column = lengths[:, ordered.index(x)]
    lhs = Fraction(int(column.sum()), len(column))
    bound = expected_gap_bound(scheme, m, len(ordered))
    strict = scheme == "modprime"
    return LemmaCheckResult(
        name=f"expected-gap-{scheme}",
        parameters={"size": size, "keys": ordered, "x": x},
        lhs=lhs,
        bound=bound,
        direction="strict_lower" if strict else "lower",
        holds=lhs > bound if strict else lhs >= bound,
    )


def fully_random_baseline(v: ValueAssignment, reject_empty: bool = False) -> DistinguishReport:
    """
    Exact Pr[sampled sum != 0] when every subset of the universe is equally likely.

    With reject_empty the empty subset is excluded. For any non-zero F2
    assignment the odd subsets are exactly half, so the result is 1/2, or
    2^(u-1) / (2^u - 1) with reject_empty; other monoids do at least as well.
    """
    u = v.universe.size
    if not 1 <= u <= MAX_BASELINE_U:
        raise ParameterSpaceError(f"baseline enumerates 2^u subsets, needs u <= {MAX_BASELINE_U}")
    if v.n == 0:
        raise ParameterSpaceError("baseline needs a non-empty assignment")
    masks = np.arange(1 << u, dtype=np.uint64)
    keys = np.array(v.keys(), dtype=np.uint64)
    chosen = (masks[:, None] >> keys[None, :]) & np.uint64(1)
    sums = chosen @ v.value_array().astype(np.uint64)
    if v.tag.kind is monoid.MonoidKind.F2:
        sums = sums & np.uint64(1)
    nonzero = sums.any(axis=1) if sums.ndim == 2 else sums != 0
    hits = int(nonzero.sum())
    subsets = (1 << u) - 1 if reject_empty else 1 << u
    bound = Fraction(1 << (u - 1), subsets)
    probability = Fraction(hits, subsets)
    return DistinguishReport(
        method="exhaustive",
        scheme="fullyrandom",
        universe_size=u,
        monoid=v.tag.name,
        n=v.n,
        probability=probability,
        good_total=hits,
        denominator=subsets,
        bound=bound,
        holds=probability >= bound,
        label="reject_empty" if reject_empty else None,
    )


def small_bias_check(
    keys: Sequence[int],
    d: int,
    draws: int,
    seed: int,
    tolerance: float = 0.01,
    scheme: str = "oddmul2w",
    **params,
) -> SmallBiasReport:
    """
    Empirical Pr[sum of SAMPLE(x) over `keys` is odd] over fresh (samplers, b).

    The exact value lies in [(1 - eps)/2, 1/2] with eps = (7/8)^d; the check
    accepts the empirical fraction within `tolerance` of that range.
    """
    if not keys:
        raise ParameterSpaceError("the key set must be non-empty")
    if draws < 1:
        raise ParameterSpaceError("draws must be positive")
    if not params:
        params = {"w": 8} if scheme in ("oddmul2w", "mulshift") else {}
    rng = random.Random(seed)
    odd = 0
    for _ in range(draws):
        vs = VectorSampler.random(scheme, d, rng.getrandbits(64), **params)
        parity = 0
        for x in keys:
            parity ^= small_bias_bit(vs, x)
        odd += parity
    epsilon = float(MISS_PROBABILITY ** d)
    fraction = Fraction(odd, draws)
    low, high = (1 - epsilon) / 2 - tolerance, 0.5 + tolerance
    logger.info("small-bias d=%d: %d/%d odd", d, odd, draws)
    return SmallBiasReport(
        d=d,
        epsilon=epsilon,
        keys=sorted(keys),
        draws=draws,
        odd_fraction=fraction,
        low=low,
        high=high,
        holds=low <= fraction <= high,
        seed=seed,
    )
