import random
import sys
from pathlib import Path

import pytest

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from distinguisher.schemas import Universe  # noqa: E402
from distinguisher.services import monoid  # noqa: E402
from distinguisher.services.distinguish import ValueAssignment  # noqa: E402


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def pow2_universe():
    return Universe.power_of_two(8)


@pytest.fixture
def ones_123(pow2_universe):
    return ValueAssignment.ones(pow2_universe, [1, 2, 3])


def brute_force_good_count(threshold_hash, v):
    """|GOOD^h| by summing the sampled values for every threshold t."""
    good = 0
    items = v.items()
    for t in range(threshold_hash.m):
        acc = monoid.zero(v.tag)
        for x, val in items:
            if threshold_hash(x) <= t:
                acc = monoid.combine(acc, val)
        if not monoid.is_zero(acc):
            good += 1
    return good


def random_assignment(rng, universe, tag, n, small=False):
    """n random keys of the universe with random non-zero values of the monoid."""
    keys = rng.sample(range(universe.size), n)
    v = ValueAssignment(universe, tag)
    for x in keys:
        if tag.kind is monoid.MonoidKind.F2:
            raw = 1
        elif tag.kind is monoid.MonoidKind.WRAP_INT64:
            raw = rng.choice([-2, -1, 1, 2]) if small else rng.getrandbits(64) or 1
        else:
            raw = [rng.choice([-1, 0, 1]) for _ in range(tag.length)]
        v.set(x, monoid.value(tag, raw))
    return v
