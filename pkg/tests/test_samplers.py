import random

import pytest
from hypothesis import given, strategies as st

from distinguisher.errors import ConstructionError, UniverseError
from distinguisher.schemas import (
    Affine2IndepSpec,
    FullyRandomSpec,
    ModPrimeSpec,
    MulShiftSpec,
    OddMul2wSpec,
    ParityConstrainedSpec,
    PolyKIndepSpec,
    Prop2CounterexampleSpec,
    TabulationSpec,
    Universe,
)
from distinguisher.services import fields
from distinguisher.services.samplers import (
    SCHEMES,
    ThresholdHash,
    construct,
    random_odd,
    random_sampler,
    random_spec,
    sample_vector,
    size_params_for,
)

SIZE_PARAMS = {
    "oddmul2w": {"w": 8},
    "modprime": {"p": 17},
    "affine2indep": {"p": 17},
    "polykindep": {"field": "gf2e", "field_param": 8, "k": 4},
    "tabulation": {"c": 2, "char_bits": 4, "r": 8},
    "mulshift": {"w": 8},
    "parity": {"u": 6},
    "prop2": {"n": 2},
    "fullyrandom": {"u": 6, "reject_empty": True},
}


@pytest.mark.parametrize("spec, message", [
    (OddMul2wSpec(w=8, a=4, t=0), "multiplier must be odd"),
    (OddMul2wSpec(w=8, a=257, t=0), "multiplier must lie"),
    (OddMul2wSpec(w=8, a=3, t=256), "threshold"),
    (OddMul2wSpec(w=65, a=3, t=0), "word size"),
    (ModPrimeSpec(p=15, a=2, t=0), "must be prime"),
    (ModPrimeSpec(p=17, a=0, t=0), "multiplier"),
    (Affine2IndepSpec(p=17, a=17, b=0, t=0), "a and b"),
    (MulShiftSpec(w=8, a=256), "multiplier"),
    (ParityConstrainedSpec(u=3, bits="100"), "even parity"),
    (ParityConstrainedSpec(u=3, bits="10"), "expected 3 bits"),
    (FullyRandomSpec(u=3, bits="000", reject_empty=True), "at least one key"),
    (TabulationSpec(c=2, char_bits=1, r=2, tables=[[0, 1]]), "expected 2 tables"),
    (TabulationSpec(c=2, char_bits=1, r=2, tables=[[0, 1], [0, 4]]), "table entries"),
    (PolyKIndepSpec(field="mersenne", field_param=60, coefficients=[1]), "Mersenne"),
    (PolyKIndepSpec(field="gf2e", field_param=8, coefficients=[256]), "in the field"),
    (PolyKIndepSpec(field="gf2e", field_param=8, coefficients=[1], output_rule="threshold"), "tau"),
    (Prop2CounterexampleSpec(n=2, positive_outcome="balanced", negative_outcome="none",
                             positive_subset=[0]), "balanced outcome"),
    (Prop2CounterexampleSpec(n=2, positive_outcome="none", negative_outcome="none",
                             positive_subset=[0, 1]), "no subset"),
])
def test_construct_rejects_invalid_specs(spec, message):
    with pytest.raises(ConstructionError, match=message):
        construct(spec)


def test_threshold_sampler_decision():
    sampler = construct(OddMul2wSpec(w=8, a=3, t=100))
    for x in range(256):
        assert sampler.sample(x) == int((3 * x) % 256 <= 100)


def test_zero_key_always_sampled():
    sampler = construct(OddMul2wSpec(w=64, a=(1 << 63) + 1, t=0))
    assert sampler.sample(0) == 1


def test_key_outside_universe():
    sampler = construct(ModPrimeSpec(p=17, a=3, t=5))
    with pytest.raises(UniverseError):
        sampler.sample(17)
    assert sampler.universe == Universe.prime(17)


def test_affine_hash():
    h = ThresholdHash.from_spec(Affine2IndepSpec(p=17, a=3, b=5, t=0))
    assert [h(x) for x in range(3)] == [5, 8, 11]


@pytest.mark.parametrize("w", range(2, 13))
def test_odd_multiplier_is_a_bijection(w):
    m = 1 << w
    rng = random.Random(w)
    for a in {1, m - 1, random_odd(rng, w), random_odd(rng, w)}:
        h = ThresholdHash.from_spec(OddMul2wSpec(w=w, a=a, t=0))
        assert sorted(h(x) for x in range(m)) == list(range(m))


@pytest.mark.parametrize("p", [2, 3, 17, 257, 1031, 4099])
def test_prime_multiplier_is_a_bijection(p):
    rng = random.Random(p)
    for a in {1, p - 1, rng.randrange(1, p)}:
        h = ThresholdHash.from_spec(ModPrimeSpec(p=p, a=a, t=0))
        assert sorted(h(x) for x in range(p)) == list(range(p))


def _threshold_spec(scheme, a, b, t):
    if scheme == "oddmul2w":
        return OddMul2wSpec(w=8, a=2 * (a % 128) + 1, t=t)
    if scheme == "modprime":
        return ModPrimeSpec(p=257, a=a % 256 + 1, t=t)
    return Affine2IndepSpec(p=257, a=a, b=b, t=t)


@pytest.mark.parametrize("scheme", ["oddmul2w", "modprime", "affine2indep"])
@given(a=st.integers(0, 255), b=st.integers(0, 256), t1=st.integers(0, 255),
       t2=st.integers(0, 255), x=st.integers(0, 255))
def test_threshold_is_monotone(scheme, a, b, t1, t2, x):
    lo, hi = sorted((t1, t2))
    low = construct(_threshold_spec(scheme, a, b, lo)).sample(x)
    high = construct(_threshold_spec(scheme, a, b, hi)).sample(x)
    assert low <= high


def test_polynomial_sampler_low_bit():
    spec = PolyKIndepSpec(field="gf2e", field_param=8, coefficients=[7, 11, 13, 17])
    sampler = construct(spec)
    for x in range(256):
        assert sampler.sample(x) == fields.gf_poly_eval([7, 11, 13, 17], x, 8) & 1


def test_mersenne_polynomial_threshold():
    p = (1 << 61) - 1
    spec = PolyKIndepSpec(
        field="mersenne", field_param=61, coefficients=[5, 1], output_rule="threshold", tau=10
    )
    sampler = construct(spec)
    assert sampler.universe_size == p
    assert sampler.evaluate(3) == 8
    assert sampler.sample(3) == 1
    assert sampler.sample(6) == 0


def test_tabulation_hash():
    spec = TabulationSpec(c=2, char_bits=2, r=4, tables=[[0, 1, 2, 3], [0, 4, 8, 12]], bit=2)
    sampler = construct(spec)
    assert sampler.universe_size == 16
    # x = 0b0110: chars (2, 1) -> 2 ^ 4 = 6
    assert sampler.hash_value(6) == 6
    assert sampler.sample(6) == 1


def test_mulshift_takes_top_bit():
    sampler = construct(MulShiftSpec(w=8, a=3))
    assert [sampler.sample(x) for x in (42, 43, 86)] == [0, 1, 0]


def test_materialized_samplers():
    parity = construct(ParityConstrainedSpec(u=4, bits="0110"))
    assert sample_vector(parity) == [0, 1, 1, 0]
    prop2 = construct(Prop2CounterexampleSpec(
        n=2, positive_outcome="balanced", positive_subset=[1, 3], negative_outcome="all"
    ))
    assert sample_vector(prop2) == [0, 1, 0, 1, 1, 1, 1, 1]
    assert prop2.universe == Universe.of_range(8)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_random_spec_is_deterministic_and_valid(scheme):
    params = SIZE_PARAMS[scheme]
    assert random_spec(scheme, 7, **params) == random_spec(scheme, 7, **params)
    sampler = construct(random_spec(scheme, 7, **params))
    bits = sample_vector(sampler, min(sampler.universe_size, 64))
    assert set(bits) <= {0, 1}


def test_random_spec_parity_is_even():
    for seed in range(20):
        assert sum(sample_vector(random_sampler("parity", seed, u=9))) % 2 == 0


def test_random_spec_errors():
    with pytest.raises(ConstructionError, match="unknown scheme"):
        random_spec("cuckoo", 0)
    with pytest.raises(ConstructionError, match="size parameter"):
        random_spec("oddmul2w", 0)


def test_random_odd():
    rng = random.Random(1)
    for _ in range(100):
        a = random_odd(rng, 8)
        assert a % 2 == 1 and 0 < a < 256


def test_size_params_for():
    assert size_params_for(Universe.power_of_two(10), "oddmul2w") == {"w": 10}
    assert size_params_for(Universe.prime(17), "affine2indep") == {"p": 17}
    assert size_params_for(Universe.of_range(12), "fullyrandom") == {"u": 12}
    with pytest.raises(UniverseError):
        size_params_for(Universe.prime(17), "oddmul2w")


def test_trivial_threshold_samplers():
    everything = construct(OddMul2wSpec(w=8, a=1, t=255))
    assert sample_vector(everything) == [1] * 256
    only_zero = construct(ModPrimeSpec(p=257, a=1, t=0))
    assert sample_vector(only_zero) == [1] + [0] * 256


def test_modprime_multiplier_never_zero():
    for seed in range(500):
        spec = random_spec("modprime", seed, p=257)
        assert 1 <= spec.a < 257 and 0 <= spec.t < 257


def test_random_odd_multiplier_is_uniform():
    counts = [0] * 128
    for seed in range(12_800):
        counts[random_spec("oddmul2w", seed, w=8).a // 2] += 1
    chi_square = sum((c - 100) ** 2 / 100 for c in counts)
    # 127 degrees of freedom; 200 is far in the tail
    assert chi_square < 200


def test_affine_pairs_are_uniform():
    p = 17
    for x, y in [(0, 1), (3, 11), (16, 2)]:
        seen = {((a * x + b) % p, (a * y + b) % p) for a in range(p) for b in range(p)}
        assert len(seen) == p * p


def test_gf16_polynomial_bits_are_4_wise_uniform():
    keys = [1, 5, 9, 14]
    counts = {}
    for seed in range(1 << 16):
        coefficients = [(seed >> (4 * i)) & 15 for i in range(4)]
        pattern = tuple(fields.gf_poly_eval(coefficients, x, 4) & 1 for x in keys)
        counts[pattern] = counts.get(pattern, 0) + 1
    assert len(counts) == 16
    assert set(counts.values()) == {1 << 12}


@given(st.integers(0, 255), st.integers(0, 127))
def test_mulshift_splits_msb_pairs_by_parity(a, x):
    sampler = construct(MulShiftSpec(w=8, a=a))
    assert sampler.sample(x) ^ sampler.sample(x + 128) == a % 2


def test_tabulation_square_cancels_for_all_one_bit_tables():
    keys = [0, 2, 1, 3]
    for fill in range(16):
        tables = [[fill & 1, fill >> 1 & 1], [fill >> 2 & 1, fill >> 3 & 1]]
        sampler = construct(TabulationSpec(c=2, char_bits=1, r=1, tables=tables))
        parity = 0
        for x in keys:
            parity ^= sampler.sample(x)
        assert parity == 0


@pytest.mark.parametrize("u, dropped", [(4, 0), (5, 2), (6, 5)])
def test_parity_sample_is_uniform_on_any_u_minus_one_keys(u, dropped):
    keys = [x for x in range(u) if x != dropped]
    draws = 1000 << (u - 1)
    counts = {}
    for seed in range(draws):
        bits = sample_vector(random_sampler("parity", seed, u=u))
        pattern = tuple(bits[x] for x in keys)
        counts[pattern] = counts.get(pattern, 0) + 1
    assert len(counts) == 1 << (u - 1)
    chi_square = sum((c - 1000) ** 2 / 1000 for c in counts.values())
    # at most 31 degrees of freedom
    assert chi_square < 80
