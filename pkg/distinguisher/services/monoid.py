"""
Commutative monoids over which sampled sums are accumulated.

Three instances are shipped: F2 (bits under XOR), WrapInt64 (unsigned 64-bit
integers with wrap-around addition) and IntVector(n) (fixed-length vectors of
WrapInt64 components).
"""
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple, Union

from distinguisher.errors import InputFormatError, ShapeError

MASK64 = (1 << 64) - 1
DECIMAL = re.compile(r"[0-9]+")

Payload = Union[int, Tuple[int, ...]]


class MonoidKind(Enum):
    F2 = "f2"
    WRAP_INT64 = "wrapint64"
    INT_VECTOR = "intvector"


@dataclass(frozen=True)
class MonoidTag:
    kind: MonoidKind
    length: int = 1

    def __post_init__(self):
        if self.kind is MonoidKind.INT_VECTOR and self.length < 1:
            raise ShapeError("IntVector length must be positive")
        if self.kind is not MonoidKind.INT_VECTOR and self.length != 1:
            raise ShapeError(f"{self.kind.value} has no length parameter")

    @property
    def name(self) -> str:
        if self.kind is MonoidKind.INT_VECTOR:
            return f"intvector:{self.length}"
        return self.kind.value


F2 = MonoidTag(MonoidKind.F2)
WRAP_INT64 = MonoidTag(MonoidKind.WRAP_INT64)


def int_vector(length: int) -> MonoidTag:
    return MonoidTag(MonoidKind.INT_VECTOR, length)


def parse_tag(text: str) -> MonoidTag:
    """
    Parse a monoid name as used on the command line and in corpus files.

    Accepted forms are ``f2``, ``wrapint64`` and ``intvector:<n>``.
    """
    name = text.strip().lower()
    if name == MonoidKind.F2.value:
        return F2
    if name == MonoidKind.WRAP_INT64.value:
        return WRAP_INT64
    if name.startswith(MonoidKind.INT_VECTOR.value + ":"):
        length = name.split(":", 1)[1]
        if not DECIMAL.fullmatch(length):
            raise InputFormatError(f"bad IntVector length in monoid '{text}'")
        return int_vector(int(length))
    raise InputFormatError(f"unknown monoid '{text}'")


@dataclass(frozen=True)
class MonoidValue:
    tag: MonoidTag
    payload: Payload

    def __repr__(self) -> str:
        return f"MonoidValue({self.tag.name}, {self.payload!r})"


def value(tag: MonoidTag, raw: Union[int, Iterable[int]]) -> MonoidValue:
    """
    Build a monoid element from a raw payload.

    Integers are reduced into the monoid: F2 takes the low bit, WrapInt64 wraps
    modulo 2^64 (so -1 becomes 2^64 - 1), IntVector wraps each component.

    Raises:
        ShapeError: if the payload shape does not match the tag.
    """
    if tag.kind is MonoidKind.F2:
        if not isinstance(raw, int):
            raise ShapeError("F2 payload must be a single bit")
        return MonoidValue(tag, raw & 1)
    if tag.kind is MonoidKind.WRAP_INT64:
        if not isinstance(raw, int):
            raise ShapeError("WrapInt64 payload must be an integer")
        return MonoidValue(tag, raw & MASK64)
    if isinstance(raw, int):
        raise ShapeError(f"{tag.name} payload must be a sequence")
    components = tuple(int(c) & MASK64 for c in raw)
    if len(components) != tag.length:
        raise ShapeError(
            f"{tag.name} payload has {len(components)} components, expected {tag.length}"
        )
    return MonoidValue(tag, components)


def zero(tag: MonoidTag) -> MonoidValue:
    if tag.kind is MonoidKind.INT_VECTOR:
        return MonoidValue(tag, (0,) * tag.length)
    return MonoidValue(tag, 0)


def combine(a: MonoidValue, b: MonoidValue) -> MonoidValue:
    """Monoid addition: XOR for F2, addition mod 2^64 otherwise."""
    if a.tag != b.tag:
        raise ShapeError(f"cannot combine {a.tag.name} with {b.tag.name}")
    kind = a.tag.kind
    if kind is MonoidKind.F2:
        return MonoidValue(a.tag, a.payload ^ b.payload)
    if kind is MonoidKind.WRAP_INT64:
        return MonoidValue(a.tag, (a.payload + b.payload) & MASK64)
    return MonoidValue(
        a.tag, tuple((x + y) & MASK64 for x, y in zip(a.payload, b.payload))
    )


def is_zero(a: MonoidValue) -> bool:
    if a.tag.kind is MonoidKind.INT_VECTOR:
        return not any(a.payload)
    return a.payload == 0


def total(tag: MonoidTag, values: Iterable[MonoidValue]) -> MonoidValue:
    acc = zero(tag)
    for v in values:
        acc = combine(acc, v)
    return acc


def to_signed(x: int) -> int:
    """Read a WrapInt64 payload as a two's-complement signed integer."""
    x &= MASK64
    return x - (1 << 64) if x >> 63 else x


def parse_value(tag: MonoidTag, text: str) -> MonoidValue:
    """
    Parse the textual value form of the stream format.

    F2 values are 0/1, WrapInt64 values are decimal (negative values wrap),
    IntVector values are comma-separated decimals.
    """
    text = text.strip()
    try:
        if tag.kind is MonoidKind.F2:
            if text not in ("0", "1"):
                raise InputFormatError(f"F2 value must be 0 or 1, got '{text}'")
            return value(tag, int(text))
        if tag.kind is MonoidKind.WRAP_INT64:
            return value(tag, int(text))
        return value(tag, [int(part) for part in text.split(",")])
    except ValueError as e:
        if isinstance(e, InputFormatError):
            raise
        raise InputFormatError(f"bad {tag.name} value '{text}': {e}")


def format_value(a: MonoidValue) -> str:
    if a.tag.kind is MonoidKind.INT_VECTOR:
        return ",".join(str(c) for c in a.payload)
    return str(a.payload)
