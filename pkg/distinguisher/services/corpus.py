"""
The adversarial corpus of value assignments used by the exhaustive checks.

A corpus file holds recipes rather than assignments; expansion is seeded, so
the same file always yields the same assignments.
"""
import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from distinguisher.errors import InputFormatError
from distinguisher.schemas import CorpusFile, MsbPairsRecipe, PrefixOnesRecipe, RandomRecipe, Universe
from distinguisher.services import monoid
from distinguisher.services.distinguish import ValueAssignment
from distinguisher.services.monoid import MonoidTag

logger = logging.getLogger(__name__)

BUILTIN = "builtin"
BUILTIN_PATH = Path(__file__).resolve().parent.parent / "corpus" / "builtin_corpus.json"

SMALL_SIGNED = (-2, -1, 1, 2)


@dataclass(frozen=True)
class CorpusEntry:
    """One assignment on keys of [2^w]; values are raw payloads."""

    label: str
    tag: MonoidTag
    values: Dict[int, int]
    msb_pair: Optional[Tuple[int, int]] = None

    @property
    def n(self) -> int:
        return len(self.values)

    def assignment(self, universe: Universe) -> ValueAssignment:
        """
        The entry on `universe`: keys are reduced modulo its size and
        colliding values added, so an entry may shrink (or vanish) on a small
        prime.

        MSB-pair entries are lifted instead on power-of-two universes: the
        pair {x, y} becomes {x, x + 2^(w-1), y, y + 2^(w-1)} for the universe's w.
        """
        v = ValueAssignment(universe, self.tag)
        if self.msb_pair is not None and universe.kind == "pow2":
            half = universe.size // 2
            if max(self.msb_pair) < half:
                for x in self.msb_pair:
                    v.set(x, monoid.value(self.tag, 1))
                    v.set(x + half, monoid.value(self.tag, 1))
                return v
        for x, raw in sorted(self.values.items()):
            v.add(x % universe.size, monoid.value(self.tag, raw))
        return v


def _prefix_ones(recipe: PrefixOnesRecipe, w: int) -> List[CorpusEntry]:
    return [
        CorpusEntry(f"prefix-ones-{n}", monoid.F2, {x: 1 for x in range(n)})
        for n in recipe.sizes
        if 1 <= n <= 1 << w
    ]


def _msb_pairs(recipe: MsbPairsRecipe, w: int) -> List[CorpusEntry]:
    half = 1 << (w - 1)
    entries = []
    for pair in recipe.pairs:
        if len(pair) != 2 or pair[0] == pair[1] or not all(0 <= x < half for x in pair):
            raise InputFormatError(f"msb pair {pair} must be two distinct keys below {half}")
        x, y = pair
        keys = (x, x + half, y, y + half)
        entries.append(
            CorpusEntry(f"msb-pair-{x}-{y}", monoid.F2, {k: 1 for k in keys}, msb_pair=(x, y))
        )
    return entries


def _random(recipe: RandomRecipe, w: int) -> List[CorpusEntry]:
    tag = monoid.parse_tag(recipe.monoid)
    if tag.kind is monoid.MonoidKind.INT_VECTOR:
        raise InputFormatError("random corpus recipes take scalar monoids")
    rng = random.Random(recipe.seed)
    entries = []
    for i in range(recipe.count):
        n = rng.randint(1, min(recipe.max_n, 1 << w))
        keys = sorted(rng.sample(range(1 << w), n))
        if recipe.values == "bits":
            values = {x: 1 for x in keys}
        elif recipe.values == "small_signed":
            values = {x: rng.choice(SMALL_SIGNED) for x in keys}
        else:
            values = {x: rng.getrandbits(64) or 1 for x in keys}
        entries.append(CorpusEntry(f"random-{tag.name}-{recipe.seed}-{i}", tag, values))
    return entries


def expand(corpus: CorpusFile) -> List[CorpusEntry]:
    entries: List[CorpusEntry] = []
    for recipe in corpus.recipes:
        if isinstance(recipe, PrefixOnesRecipe):
            entries += _prefix_ones(recipe, corpus.w)
        elif isinstance(recipe, MsbPairsRecipe):
            entries += _msb_pairs(recipe, corpus.w)
        else:
            entries += _random(recipe, corpus.w)
    return entries


def load_corpus(source: Union[str, Path] = BUILTIN) -> List[CorpusEntry]:
    """
    Load and expand a corpus.

    Args:
        source: "builtin" for the shipped corpus, or the path of a corpus file

    Raises:
        InputFormatError: unreadable file or invalid recipes
    """
    path = BUILTIN_PATH if str(source) == BUILTIN else Path(source)
    try:
        with open(path, "r") as f:
            data = json.load(f)
        corpus = CorpusFile.model_validate(data)
    except (OSError, json.JSONDecodeError) as e:
        raise InputFormatError(f"cannot read corpus {path}: {e}")
    except ValidationError as e:
        raise InputFormatError(f"invalid corpus {path}: {e}")
    entries = expand(corpus)
    logger.info("corpus %s v%d: %d entries", path.name, corpus.version, len(entries))
    return entries

