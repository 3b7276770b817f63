"""Exact checks of the distinguisher bounds over the shipped corpus."""
from fractions import Fraction

import pytest

from distinguisher.schemas import Universe
from distinguisher.services.corpus import load_corpus
from distinguisher.services.verify import exhaustive_prob


@pytest.fixture(scope="module")
def corpus():
    return load_corpus()


def test_oddmul2w_w8_meets_one_eighth(corpus):
    universe = Universe.power_of_two(8)
    for entry in corpus:
        report = exhaustive_prob("oddmul2w", 8, entry.assignment(universe), label=entry.label)
        assert report.probability >= Fraction(1, 8), entry.label
        assert report.denominator == 128 * 256


@pytest.mark.slow
def test_modprime_p257_meets_one_eighth(corpus):
    universe = Universe.prime(257)
    for entry in corpus:
        report = exhaustive_prob("modprime", 257, entry.assignment(universe), label=entry.label)
        assert report.probability >= Fraction(1, 8), entry.label


@pytest.mark.slow
def test_affine_p257_meets_its_bound(corpus):
    universe = Universe.prime(257)
    for entry in corpus:
        v = entry.assignment(universe)
        if v.n > 32:
            continue
        report = exhaustive_prob("affine2indep", 257, v, workers=2, label=entry.label)
        assert report.probability >= (1 - Fraction(v.n * v.n, 257 * 257)) / 8, entry.label
