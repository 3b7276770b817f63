import json

import pytest

from distinguisher.errors import InputFormatError
from distinguisher.schemas import Universe
from distinguisher.services import monoid
from distinguisher.services.corpus import CorpusEntry, load_corpus


@pytest.fixture(scope="module")
def builtin():
    return load_corpus()


def test_builtin_corpus_size(builtin):
    assert len(builtin) == 8 + 6 + 50 + 20
    labels = [e.label for e in builtin]
    assert len(set(labels)) == len(labels)
    assert labels[:3] == ["prefix-ones-1", "prefix-ones-2", "prefix-ones-3"]
    assert "msb-pair-1-2" in labels


def test_builtin_corpus_is_reproducible(builtin):
    again = load_corpus("builtin")
    assert [(e.label, e.values) for e in again] == [(e.label, e.values) for e in builtin]


def test_builtin_keys_and_values(builtin):
    for entry in builtin:
        assert 1 <= entry.n <= 64
        assert all(0 <= x < 256 for x in entry.values)
        assert all(raw != 0 for raw in entry.values.values())
    tags = {e.tag for e in builtin}
    assert tags == {monoid.F2, monoid.WRAP_INT64}


def test_msb_pair_entry(builtin):
    entry = next(e for e in builtin if e.label == "msb-pair-3-77")
    assert sorted(entry.values) == [3, 77, 131, 205]


@pytest.mark.parametrize("w", [8, 12, 64])
def test_msb_pair_entry_lifts_to_the_universe_word_size(builtin, w):
    entry = next(e for e in builtin if e.label == "msb-pair-3-77")
    half = 1 << (w - 1)
    v = entry.assignment(Universe.power_of_two(w))
    assert v.keys() == [3, 77, 3 + half, 77 + half]
    assert all(val == monoid.value(monoid.F2, 1) for _, val in v.items())


def test_msb_pair_entry_on_a_prime_is_reduced(builtin):
    entry = next(e for e in builtin if e.label == "msb-pair-3-77")
    # 131 and 205 reduce to 0 and 74 modulo 131
    assert entry.assignment(Universe.prime(131)).keys() == [0, 3, 74, 77]


def test_assignment_reduces_keys_and_merges_collisions():
    entry = CorpusEntry("clash", monoid.WRAP_INT64, {1: 2, 18: -2, 5: 3})
    v = entry.assignment(Universe.prime(17))
    assert v.keys() == [5]
    assert entry.assignment(Universe.power_of_two(8)).n == 3


def _write(tmp_path, data):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps(data))
    return path


def test_custom_corpus(tmp_path):
    path = _write(tmp_path, {
        "version": 2,
        "w": 4,
        "recipes": [
            {"kind": "prefix_ones", "sizes": [2, 99]},
            {"kind": "random", "monoid": "wrapint64", "count": 3, "seed": 5, "max_n": 4, "values": "small_signed"},
        ],
    })
    entries = load_corpus(path)
    assert [e.label for e in entries] == ["prefix-ones-2", "random-wrapint64-5-0", "random-wrapint64-5-1",
                                          "random-wrapint64-5-2"]
    assert all(abs(monoid.to_signed(raw)) <= 2 for e in entries[1:] for raw in e.values.values())


@pytest.mark.parametrize("data", [
    {"version": 1, "w": 1, "recipes": []},
    {"version": 1, "w": 8, "recipes": [{"kind": "triangles"}]},
    {"version": 1, "w": 8, "recipes": [{"kind": "msb_pairs", "pairs": [[1, 1]]}]},
    {"version": 1, "w": 8, "recipes": [{"kind": "msb_pairs", "pairs": [[1, 200]]}]},
    {"version": 1, "w": 8, "recipes": [{"kind": "random", "monoid": "intvector:2", "count": 1, "seed": 0,
                                        "max_n": 2}]},
    {"version": 1, "w": 8, "recipes": [], "extra": True},
])
def test_invalid_corpus(tmp_path, data):
    with pytest.raises(InputFormatError):
        load_corpus(_write(tmp_path, data))


def test_unreadable_corpus(tmp_path):
    with pytest.raises(InputFormatError):
        load_corpus(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputFormatError):
        load_corpus(bad)
