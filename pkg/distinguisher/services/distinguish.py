"""
Sampled sums, streaming accumulation, the exact good-interval measure, and the
vector / small-bias compositions built from several samplers.
"""
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from distinguisher.errors import InputFormatError, ParameterSpaceError, ShapeError, UniverseError
from distinguisher.schemas import SamplerSpec, Universe
from distinguisher.services import monoid
from distinguisher.services.monoid import MonoidKind, MonoidTag, MonoidValue
from distinguisher.services.samplers import Sampler, ThresholdHash, random_sampler

logger = logging.getLogger(__name__)

# Per-sampler miss probability of the 1/8 distinguishers.
MISS_PROBABILITY = Fraction(7, 8)


class ValueAssignment:
    """
    Sparse value function v: U -> R holding only the non-zero entries.

    Zero values are never stored: inserting zero (or accumulating to zero)
    removes the key. n = |S| is the number of stored keys.
    """

    def __init__(self, universe: Universe, tag: MonoidTag, entries: Optional[Dict[int, MonoidValue]] = None):
        self.universe = universe
        self.tag = tag
        self._entries: Dict[int, MonoidValue] = {}
        for x, val in (entries or {}).items():
            self.set(x, val)

    @classmethod
    def from_raw(cls, universe: Universe, tag: MonoidTag, raw: Dict[int, object]) -> "ValueAssignment":
        """Build from raw payloads (ints, or sequences for IntVector)."""
        return cls(universe, tag, {x: monoid.value(tag, r) for x, r in raw.items()})

    @classmethod
    def ones(cls, universe: Universe, keys: Iterable[int], tag: MonoidTag = monoid.F2) -> "ValueAssignment":
        if tag.kind is MonoidKind.INT_VECTOR:
            one = monoid.value(tag, [1] * tag.length)
        else:
            one = monoid.value(tag, 1)
        return cls(universe, tag, {x: one for x in keys})

    def _check(self, x: int, val: MonoidValue) -> None:
        if not 0 <= x < self.universe.size:
            raise UniverseError(f"key {x} outside universe of size {self.universe.size}")
        if val.tag != self.tag:
            raise ShapeError(f"value of {val.tag.name} in a {self.tag.name} assignment")

    def set(self, x: int, val: MonoidValue) -> None:
        self._check(x, val)
        if monoid.is_zero(val):
            self._entries.pop(x, None)
        else:
            self._entries[x] = val

    def add(self, x: int, val: MonoidValue) -> None:
        """v(x) <- v(x) + val."""
        self._check(x, val)
        current = self._entries.get(x, monoid.zero(self.tag))
        self.set(x, monoid.combine(current, val))

    def get(self, x: int) -> MonoidValue:
        return self._entries.get(x, monoid.zero(self.tag))

    def items(self) -> List[Tuple[int, MonoidValue]]:
        return sorted(self._entries.items())

    def keys(self) -> List[int]:
        return sorted(self._entries)

    @property
    def n(self) -> int:
        return len(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValueAssignment):
            return NotImplemented
        return (self.universe.size, self.tag, self._entries) == (other.universe.size, other.tag, other._entries)

    def __repr__(self) -> str:
        return f"ValueAssignment({self.tag.name}, u={self.universe.size}, n={self.n})"

    def value_array(self) -> np.ndarray:
        """
        Payloads in key order as a numpy array: uint8 bits for F2, uint64 for
        WrapInt64, shape (n, length) uint64 for IntVector.
        """
        payloads = [val.payload for _, val in self.items()]
        if self.tag.kind is MonoidKind.F2:
            return np.array(payloads, dtype=np.uint8)
        if self.tag.kind is MonoidKind.WRAP_INT64:
            return np.array(payloads, dtype=np.uint64)
        return np.array(payloads, dtype=np.uint64).reshape(len(payloads), self.tag.length)


def _check_universe(sampler: Sampler, v: ValueAssignment) -> None:
    if sampler.universe_size != v.universe.size:
        raise UniverseError(
            f"sampler universe {sampler.universe_size} differs from assignment universe {v.universe.size}"
        )


def sampled_sum(sampler: Sampler, v: ValueAssignment) -> MonoidValue:
    """Sum of v(x) over the sampled keys; only the non-zero entries are visited."""
    _check_universe(sampler, v)
    acc = monoid.zero(v.tag)
    for x, val in v.items():
        if sampler.sample(x):
            acc = monoid.combine(acc, val)
    return acc


class StreamAccumulator:
    """
    Running sampled sums of a stream of (key, value) updates, one per sampler.

    Single writer. State is d monoid values no matter how many distinct keys
    the stream touches.
    """

    def __init__(self, samplers: Sequence[Sampler], tag: MonoidTag):
        if not samplers:
            raise ParameterSpaceError("a stream accumulator needs at least one sampler")
        sizes = {s.universe_size for s in samplers}
        if len(sizes) != 1:
            raise UniverseError("all samplers of an accumulator must share one universe")
        self.samplers = list(samplers)
        self.tag = tag
        self.universe_size = sizes.pop()
        self._sums = [monoid.zero(tag) for _ in self.samplers]
        self.updates = 0

    def update(self, x: int, val: MonoidValue) -> None:
        if val.tag != self.tag:
            raise ShapeError(f"update of {val.tag.name} into a {self.tag.name} stream")
        if not 0 <= x < self.universe_size:
            raise UniverseError(f"key {x} outside universe of size {self.universe_size}")
        for i, sampler in enumerate(self.samplers):
            if sampler.sample(x):
                self._sums[i] = monoid.combine(self._sums[i], val)
        self.updates += 1

    def update_many(self, updates: Iterable[Tuple[int, MonoidValue]]) -> None:
        for x, val in updates:
            self.update(x, val)

    def digest(self) -> Tuple[MonoidValue, ...]:
        return tuple(self._sums)


@dataclass(frozen=True)
class GoodMeasure:
    m: int
    good_count: int

    def __post_init__(self):
        if not 0 <= self.good_count <= self.m:
            raise ValueError(f"good count {self.good_count} outside [0, {self.m}]")

    @property
    def probability(self) -> Fraction:
        return Fraction(self.good_count, self.m)


def good_measure(hash_part: Union[ThresholdHash, SamplerSpec], v: ValueAssignment) -> GoodMeasure:
    """
    Exact number of thresholds t in [m] whose sampled sum is non-zero.

    Keys of S are sorted by (h(x), x); the threshold line splits into the
    intervals between consecutive hash values, and an interval is good when
    the prefix sum of values up to it is non-zero. Costs O(n log n).

    Args:
        hash_part: a ThresholdHash, or a threshold-scheme spec whose t is ignored
        v: non-empty assignment on the hash's universe

    Returns:
        GoodMeasure with good_count = |GOOD^h|
    """
    if v.n == 0:
        raise ParameterSpaceError("good measure needs a non-empty assignment")
    h = hash_part if isinstance(hash_part, ThresholdHash) else ThresholdHash.from_spec(hash_part)
    if h.m != v.universe.size:
        raise UniverseError(f"hash range {h.m} differs from assignment universe {v.universe.size}")
    order = sorted((h(x), x) for x in v.keys())
    prefix = monoid.zero(v.tag)
    good = 0
    for i, (hx, x) in enumerate(order):
        prefix = monoid.combine(prefix, v.get(x))
        upper = order[i + 1][0] if i + 1 < len(order) else h.m
        if not monoid.is_zero(prefix):
            good += upper - hx
    return GoodMeasure(h.m, good)


def good_counts_batch(hashes: np.ndarray, m: int, v: ValueAssignment) -> np.ndarray:
    """
    |GOOD^h| for a block of hash functions at once.

    Args:
        hashes: int64 array (seeds, n); column j holds h(x_j) for the j-th key of
            v.keys() (ascending), so a stable sort breaks ties by key
        m: size of the threshold space
        v: the assignment

    Returns:
        int64 array of length seeds.
    """
    order = np.argsort(hashes, axis=1, kind="stable")
    sorted_hashes = np.take_along_axis(hashes, order, axis=1)
    gaps = np.diff(sorted_hashes, axis=1, append=m)
    values = v.value_array()
    if v.tag.kind is MonoidKind.F2:
        prefix = np.bitwise_xor.accumulate(values[order], axis=1)
        nonzero = prefix != 0
    elif v.tag.kind is MonoidKind.WRAP_INT64:
        prefix = np.cumsum(values[order], axis=1, dtype=np.uint64)
        nonzero = prefix != 0
    else:
        prefix = np.cumsum(values[order], axis=1, dtype=np.uint64)
        nonzero = prefix.any(axis=2)
    return (gaps * nonzero).sum(axis=1)


def samplers_for_epsilon(epsilon: float, miss: Fraction = MISS_PROBABILITY) -> int:
    """
    Smallest d with miss^d <= epsilon, i.e. ceil(log epsilon / log miss).

    The float estimate is corrected with exact arithmetic so rounding never
    yields too few samplers.
    """
    if not 0 < epsilon < 1:
        raise ParameterSpaceError("epsilon must lie in (0, 1)")
    target = Fraction(epsilon)
    d = max(1, math.ceil(math.log(epsilon) / math.log(float(miss))))
    while miss ** d > target:
        d += 1
    while d > 1 and miss ** (d - 1) <= target:
        d -= 1
    return d


class VectorSampler:
    """
    d independent samplers plus a fully random bit vector b.

    The samplers form the vector distinguisher; together with b they define
    SAMPLE(x) = <b, (Sample_1(x), ..., Sample_d(x))> mod 2.
    """

    def __init__(self, samplers: Sequence[Sampler], b: Sequence[int]):
        if not samplers:
            raise ParameterSpaceError("d must be positive")
        if len(b) != len(samplers):
            raise ParameterSpaceError("b must have one bit per sampler")
        if len({s.universe_size for s in samplers}) != 1:
            raise UniverseError("all samplers of a vector sampler must share one universe")
        self.samplers = list(samplers)
        self.b = tuple(int(bit) & 1 for bit in b)

    @property
    def d(self) -> int:
        return len(self.samplers)

    @property
    def universe_size(self) -> int:
        return self.samplers[0].universe_size

    @property
    def epsilon(self) -> Fraction:
        return MISS_PROBABILITY ** self.d

    @classmethod
    def random(cls, scheme: str, d: int, seed: int, **params) -> "VectorSampler":
        """d samplers of one scheme with seeds and b drawn from one seeded generator."""
        if d < 1:
            raise ParameterSpaceError("d must be positive")
        rng = random.Random(seed)
        samplers = [random_sampler(scheme, rng.getrandbits(64), **params) for _ in range(d)]
        b = [rng.getrandbits(1) for _ in range(d)]
        return cls(samplers, b)


def vector_sums(vs: VectorSampler, v: ValueAssignment) -> Tuple[Tuple[MonoidValue, ...], bool]:
    sums = tuple(sampled_sum(s, v) for s in vs.samplers)
    return sums, all(monoid.is_zero(s) for s in sums)


def small_bias_bit(vs: VectorSampler, x: int) -> int:
    """SAMPLE(x); samplers with b_i = 0 are never evaluated."""
    bit = 0
    for b_i, sampler in zip(vs.b, vs.samplers):
        if b_i and sampler.sample(x):
            bit ^= 1
    return bit


def parse_stream(lines: Iterable[str], tag: MonoidTag) -> Iterator[Tuple[int, MonoidValue]]:
    """
    Parse the stream text format: one `<key-decimal> <value>` update per line.

    Blank lines and lines starting with '#' are skipped.
    """
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputFormatError(f"line {lineno}: expected '<key> <value>', got '{line}'")
        key_text, value_text = parts
        if not monoid.DECIMAL.fullmatch(key_text):
            raise InputFormatError(f"line {lineno}: key must be a non-negative decimal, got '{key_text}'")
        try:
            val = monoid.parse_value(tag, value_text)
        except InputFormatError as e:
            raise InputFormatError(f"line {lineno}: {e}")
        yield int(key_text), val


def accumulate(universe: Universe, tag: MonoidTag, updates: Iterable[Tuple[int, MonoidValue]]) -> ValueAssignment:
    """Batch oracle: v(x) = sum of the update values for key x."""
    v = ValueAssignment(universe, tag)
    for x, val in updates:
        v.add(x, val)
    return v
