"""
Field arithmetic behind the polynomial samplers, plus primality testing.

- GF(2^e) with carry-less multiplication reduced by a fixed irreducible
  polynomial per degree.
- Arithmetic modulo a Mersenne prime 2^q - 1 using shift/mask reduction.
- Miller-Rabin primality: exact below 2^31 with bases (2, 3, 5, 7),
  probabilistic (seeded random bases) above.
"""
import random
from functools import lru_cache
from typing import List, Sequence

import numpy as np

from distinguisher.errors import ConstructionError

# x^e + lower terms, including the leading bit.
IRREDUCIBLE = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    16: 0x1002B,
    32: 0x10000008D,
    64: (1 << 64) | 0x1B,
}

MERSENNE_EXPONENTS = (31, 61, 89, 127)

EXACT_PRIMALITY_LIMIT = 1 << 31
PROBABILISTIC_ROUNDS = 24


def clmul(a: int, b: int) -> int:
    """Carry-less (XOR) product of two non-negative integers."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def gf_reduce(x: int, e: int) -> int:
    poly = IRREDUCIBLE[e]
    while x.bit_length() > e:
        x ^= poly << (x.bit_length() - 1 - e)
    return x


def gf_mul(a: int, b: int, e: int) -> int:
    return gf_reduce(clmul(a, b), e)


def gf_poly_eval(coefficients: Sequence[int], x: int, e: int) -> int:
    """Horner evaluation of sum(c_i x^i) over GF(2^e); coefficients low degree first."""
    h = 0
    for c in reversed(coefficients):
        h = gf_mul(h, x, e) ^ c
    return h


@lru_cache(maxsize=None)
def gf_mul_table(e: int) -> np.ndarray:
    """Full 2^e x 2^e multiplication table; only sensible for small e."""
    if e > 8:
        raise ConstructionError("multiplication tables are built for e <= 8 only")
    size = 1 << e
    table = np.zeros((size, size), dtype=np.int64)
    for a in range(size):
        for b in range(a, size):
            table[a, b] = table[b, a] = gf_mul(a, b, e)
    return table


def mersenne_reduce(x: int, q: int) -> int:
    """Reduce a non-negative x modulo 2^q - 1 with shifts and masks."""
    p = (1 << q) - 1
    while x > p:
        x = (x & p) + (x >> q)
    return 0 if x == p else x


def mersenne_poly_eval(coefficients: Sequence[int], x: int, q: int) -> int:
    """Horner evaluation modulo 2^q - 1; coefficients low degree first."""
    p = (1 << q) - 1
    h = 0
    for c in reversed(coefficients):
        h = h * x + c
        h = (h & p) + (h >> q)
    return mersenne_reduce(h, q)


def _witness(a: int, n: int, d: int, s: int) -> bool:
    """True if a proves n composite, with n - 1 = d * 2^s."""
    y = pow(a, d, n)
    if y == 1 or y == n - 1:
        return False
    for _ in range(s - 1):
        y = y * y % n
        if y == n - 1:
            return False
    return True


def is_prime(n: int, seed: int = 0) -> bool:
    """
    Miller-Rabin primality test.

    Exact for n < 2^31 (bases 2, 3, 5, 7). Above that, PROBABILISTIC_ROUNDS
    random bases drawn from a seeded generator are used, so a composite passes
    with probability below 4^-24.
    """
    if n < 2:
        return False
    for small in (2, 3, 5, 7):
        if n == small:
            return True
        if n % small == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d >> 1, s + 1
    if n < EXACT_PRIMALITY_LIMIT:
        bases: List[int] = [2, 3, 5, 7]
    else:
        rng = random.Random(seed)
        bases = [rng.randrange(2, n - 1) for _ in range(PROBABILISTIC_ROUNDS)]
    return not any(_witness(a, n, d, s) for a in bases)
