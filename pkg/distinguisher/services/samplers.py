"""
Sampling schemes behind one "construct then evaluate" surface.

Every scheme maps keys of its universe to bits. The threshold schemes
(OddMul2w, ModPrime, Affine2Indep) split into a hash part and a threshold t,
so the hash part can be reused by the exact good-interval measure.
"""
import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

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
    SamplerSpec,
    TabulationSpec,
    Universe,
)
from distinguisher.services import fields

logger = logging.getLogger(__name__)

MAX_MATERIALIZED_UNIVERSE = 1 << 20
SCHEMES = (
    "oddmul2w",
    "modprime",
    "affine2indep",
    "polykindep",
    "tabulation",
    "mulshift",
    "parity",
    "prop2",
    "fullyrandom",
)


@dataclass(frozen=True)
class ThresholdHash:
    """
    The hash part h of a threshold sampler [h(x) <= t].

    scheme is one of oddmul2w (h = a*x mod 2^w), modprime (h = a*x mod p)
    or affine2indep (h = (a*x + b) mod p); m is the size of the hash range.
    """

    scheme: str
    m: int
    a: int
    b: int = 0

    def __call__(self, x: int) -> int:
        if self.scheme == "oddmul2w":
            return (self.a * x) & (self.m - 1)
        return (self.a * x + self.b) % self.m

    @classmethod
    def from_spec(cls, spec: SamplerSpec) -> "ThresholdHash":
        if isinstance(spec, OddMul2wSpec):
            if not 1 <= spec.w <= 64:
                raise ConstructionError("word size w must be in 1..64")
            m = 1 << spec.w
            if spec.a % 2 == 0:
                raise ConstructionError("multiplier must be odd")
            if not 0 < spec.a < m:
                raise ConstructionError("multiplier must lie in [2^w]")
            return cls("oddmul2w", m, spec.a)
        if isinstance(spec, (ModPrimeSpec, Affine2IndepSpec)):
            if not fields.is_prime(spec.p):
                raise ConstructionError(f"modulus {spec.p} must be prime")
            if spec.p > fields.EXACT_PRIMALITY_LIMIT:
                logger.debug("modulus %d accepted by probabilistic primality test", spec.p)
            if isinstance(spec, ModPrimeSpec):
                if not 1 <= spec.a < spec.p:
                    raise ConstructionError("multiplier must be in [1, p-1]")
                return cls("modprime", spec.p, spec.a)
            if not 0 <= spec.a < spec.p or not 0 <= spec.b < spec.p:
                raise ConstructionError("a and b must lie in [p]")
            return cls("affine2indep", spec.p, spec.a, spec.b)
        raise ConstructionError(f"scheme '{spec.scheme}' is not a threshold scheme")


class Sampler(ABC):
    """A constructed sampling function; immutable, sample() is pure."""

    def __init__(self, spec: SamplerSpec, universe: Universe):
        self.spec = spec
        self.universe = universe

    @property
    def universe_size(self) -> int:
        return self.universe.size

    def sample(self, x: int) -> int:
        if not 0 <= x < self.universe.size:
            raise UniverseError(f"key {x} outside universe of size {self.universe.size}")
        return self._sample(x)

    @abstractmethod
    def _sample(self, x: int) -> int:
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec!r})"


class ThresholdSampler(Sampler):
    """Sample(x) = [h(x) <= t]."""

    def __init__(self, spec: SamplerSpec):
        threshold_hash = ThresholdHash.from_spec(spec)
        if threshold_hash.scheme == "oddmul2w":
            universe = Universe.power_of_two(spec.w)
        else:
            universe = Universe.prime(spec.p)
        super().__init__(spec, universe)
        self.hash = threshold_hash
        if not 0 <= spec.t < self.hash.m:
            raise ConstructionError(f"threshold t must lie in [0, {self.hash.m - 1}]")
        self.t = spec.t

    def _sample(self, x: int) -> int:
        return int(self.hash(x) <= self.t)


class PolynomialSampler(Sampler):
    """Degree k-1 polynomial over GF(2^e) or modulo 2^q - 1, reduced to one bit."""

    def __init__(self, spec: PolyKIndepSpec):
        if not spec.coefficients:
            raise ConstructionError("polynomial needs at least one coefficient")
        if spec.field == "gf2e":
            if spec.field_param not in fields.IRREDUCIBLE:
                raise ConstructionError(f"no irreducible polynomial for GF(2^{spec.field_param})")
            self.field_size = 1 << spec.field_param
            universe = Universe.power_of_two(spec.field_param)
        else:
            if spec.field_param not in fields.MERSENNE_EXPONENTS:
                raise ConstructionError(f"2^{spec.field_param} - 1 is not a supported Mersenne prime")
            self.field_size = (1 << spec.field_param) - 1
            universe = Universe.prime(self.field_size)
        if any(not 0 <= c < self.field_size for c in spec.coefficients):
            raise ConstructionError("coefficients must lie in the field")
        if spec.output_rule == "threshold":
            if spec.tau is None or not 0 <= spec.tau < self.field_size:
                raise ConstructionError("threshold output needs tau in the field")
        super().__init__(spec, universe)
        self.coefficients = tuple(spec.coefficients)

    def evaluate(self, x: int) -> int:
        if self.spec.field == "gf2e":
            return fields.gf_poly_eval(self.coefficients, x, self.spec.field_param)
        return fields.mersenne_poly_eval(self.coefficients, x, self.spec.field_param)

    def _sample(self, x: int) -> int:
        h = self.evaluate(x)
        if self.spec.output_rule == "low_bit":
            return h & 1
        return int(h <= self.spec.tau)


class TabulationSampler(Sampler):
    """Simple tabulation H_0[x_0] ^ ... ^ H_{c-1}[x_{c-1}], one output bit."""

    def __init__(self, spec: TabulationSpec):
        if spec.c < 2:
            raise ConstructionError("tabulation needs at least 2 characters")
        if spec.char_bits < 1 or spec.r < 1:
            raise ConstructionError("char_bits and r must be positive")
        if len(spec.tables) != spec.c:
            raise ConstructionError(f"expected {spec.c} tables, got {len(spec.tables)}")
        size = 1 << spec.char_bits
        for table in spec.tables:
            if len(table) != size:
                raise ConstructionError(f"every table needs 2^char_bits = {size} entries")
            if any(not 0 <= entry < (1 << spec.r) for entry in table):
                raise ConstructionError("table entries must be < 2^r")
        if not 0 <= spec.bit < spec.r:
            raise ConstructionError("output bit must be in [0, r)")
        super().__init__(spec, Universe.power_of_two(spec.c * spec.char_bits))
        self.tables = tuple(tuple(t) for t in spec.tables)
        self.char_mask = size - 1

    def hash_value(self, x: int) -> int:
        h = 0
        bits = self.spec.char_bits
        for i, table in enumerate(self.tables):
            h ^= table[(x >> (i * bits)) & self.char_mask]
        return h

    def _sample(self, x: int) -> int:
        return (self.hash_value(x) >> self.spec.bit) & 1


class MulShiftSampler(Sampler):
    """a*x >> (w-1): universal hashing to one bit, not a distinguisher."""

    def __init__(self, spec: MulShiftSpec):
        if not 1 <= spec.w <= 64:
            raise ConstructionError("word size w must be in 1..64")
        if not 0 <= spec.a < (1 << spec.w):
            raise ConstructionError("multiplier must lie in [2^w]")
        super().__init__(spec, Universe.power_of_two(spec.w))
        self.mask = (1 << spec.w) - 1

    def _sample(self, x: int) -> int:
        return ((self.spec.a * x) & self.mask) >> (self.spec.w - 1)


class MaterializedSampler(Sampler):
    """Samplers whose decisions are an explicit bit per key."""

    def __init__(self, spec: SamplerSpec, bits: List[int]):
        super().__init__(spec, Universe.of_range(len(bits)))
        self.bits = bytes(bits)

    def _sample(self, x: int) -> int:
        return self.bits[x]


def _parse_bits(bits: str, u: int) -> List[int]:
    if not 1 <= u <= MAX_MATERIALIZED_UNIVERSE:
        raise ConstructionError(f"universe size must be in 1..{MAX_MATERIALIZED_UNIVERSE}")
    if len(bits) != u:
        raise ConstructionError(f"expected {u} bits, got {len(bits)}")
    if set(bits) - {"0", "1"}:
        raise ConstructionError("bits must be '0' or '1' characters")
    return [int(c) for c in bits]


def _prop2_half(n: int, outcome: str, subset: List[int]) -> List[int]:
    if outcome == "none":
        if subset:
            raise ConstructionError("outcome 'none' takes no subset")
        return [0] * (2 * n)
    if outcome == "all":
        if subset:
            raise ConstructionError("outcome 'all' takes no subset")
        return [1] * (2 * n)
    if len(set(subset)) != n or any(not 0 <= i < 2 * n for i in subset):
        raise ConstructionError("balanced outcome needs n distinct indices in [0, 2n)")
    half = [0] * (2 * n)
    for i in subset:
        half[i] = 1
    return half


def construct(spec: SamplerSpec) -> Sampler:
    """
    Build the sampler described by spec.

    Raises:
        ConstructionError: naming the violated invariant.
    """
    if isinstance(spec, (OddMul2wSpec, ModPrimeSpec, Affine2IndepSpec)):
        return ThresholdSampler(spec)
    if isinstance(spec, PolyKIndepSpec):
        return PolynomialSampler(spec)
    if isinstance(spec, TabulationSpec):
        return TabulationSampler(spec)
    if isinstance(spec, MulShiftSpec):
        return MulShiftSampler(spec)
    if isinstance(spec, ParityConstrainedSpec):
        bits = _parse_bits(spec.bits, spec.u)
        if sum(bits) % 2:
            raise ConstructionError("parity-constrained bits must have even parity")
        return MaterializedSampler(spec, bits)
    if isinstance(spec, FullyRandomSpec):
        bits = _parse_bits(spec.bits, spec.u)
        if spec.reject_empty and not any(bits):
            raise ConstructionError("reject_empty sampler must sample at least one key")
        return MaterializedSampler(spec, bits)
    if isinstance(spec, Prop2CounterexampleSpec):
        if spec.n < 1:
            raise ConstructionError("n must be positive")
        bits = _prop2_half(spec.n, spec.positive_outcome, spec.positive_subset)
        bits += _prop2_half(spec.n, spec.negative_outcome, spec.negative_subset)
        return MaterializedSampler(spec, bits)
    raise ConstructionError(f"unknown scheme {spec!r}")


def random_odd(rng: random.Random, w: int) -> int:
    # 2r + 1 for uniform r in [2^(w-1)]
    return 2 * rng.getrandbits(w - 1) + 1


def _prop2_draw(rng: random.Random, n: int):
    r = rng.randrange(4 * n)
    if r == 0:
        return "none", []
    if r == 1:
        return "all", []
    return "balanced", sorted(rng.sample(range(2 * n), n))


def random_spec(scheme: str, seed: int, **params: Any) -> SamplerSpec:
    """
    Draw a spec with every random parameter taken from the scheme's distribution.

    Args:
        scheme: one of SCHEMES
        seed: seed of the generator; equal seeds give equal specs
        **params: size parameters of the scheme
            oddmul2w / mulshift: w
            modprime / affine2indep: p
            polykindep: field, field_param, k, output_rule (default low_bit), tau
            tabulation: c, char_bits, r, bit (default 0)
            parity / fullyrandom: u (fullyrandom also reject_empty)
            prop2: n

    Returns:
        A spec that construct() accepts.
    """
    rng = random.Random(seed)
    try:
        if scheme == "oddmul2w":
            w = params["w"]
            if not 1 <= w <= 64:
                raise ConstructionError("word size w must be in 1..64")
            return OddMul2wSpec(w=w, a=random_odd(rng, w), t=rng.getrandbits(w), seed=seed)
        if scheme == "modprime":
            p = params["p"]
            return ModPrimeSpec(p=p, a=rng.randrange(1, p), t=rng.randrange(p), seed=seed)
        if scheme == "affine2indep":
            p = params["p"]
            return Affine2IndepSpec(
                p=p, a=rng.randrange(p), b=rng.randrange(p), t=rng.randrange(p), seed=seed
            )
        if scheme == "polykindep":
            field, param, k = params["field"], params["field_param"], params["k"]
            size = (1 << param) if field == "gf2e" else (1 << param) - 1
            rule = params.get("output_rule", "low_bit")
            tau = params.get("tau")
            coefficients = [rng.randrange(size) for _ in range(k)]
            if rule == "threshold" and tau is None:
                tau = rng.randrange(size)
            return PolyKIndepSpec(
                field=field,
                field_param=param,
                coefficients=coefficients,
                output_rule=rule,
                tau=tau,
                seed=seed,
            )
        if scheme == "tabulation":
            c, char_bits, r = params["c"], params["char_bits"], params["r"]
            tables = [[rng.getrandbits(r) for _ in range(1 << char_bits)] for _ in range(c)]
            return TabulationSpec(
                c=c, char_bits=char_bits, r=r, tables=tables, bit=params.get("bit", 0), seed=seed
            )
        if scheme == "mulshift":
            w = params["w"]
            return MulShiftSpec(w=w, a=rng.getrandbits(w), seed=seed)
        if scheme == "parity":
            u = params["u"]
            head = [rng.getrandbits(1) for _ in range(u - 1)]
            bits = head + [sum(head) % 2]
            return ParityConstrainedSpec(u=u, bits="".join(map(str, bits)), seed=seed)
        if scheme == "fullyrandom":
            u = params["u"]
            reject_empty = params.get("reject_empty", False)
            while True:
                bits = [rng.getrandbits(1) for _ in range(u)]
                if any(bits) or not reject_empty:
                    break
            return FullyRandomSpec(
                u=u, bits="".join(map(str, bits)), reject_empty=reject_empty, seed=seed
            )
        if scheme == "prop2":
            n = params["n"]
            positive, positive_subset = _prop2_draw(rng, n)
            negative, negative_subset = _prop2_draw(rng, n)
            return Prop2CounterexampleSpec(
                n=n,
                positive_outcome=positive,
                negative_outcome=negative,
                positive_subset=positive_subset,
                negative_subset=negative_subset,
                seed=seed,
            )
    except KeyError as e:
        raise ConstructionError(f"scheme '{scheme}' needs size parameter {e}")
    except ValueError as e:
        if isinstance(e, ConstructionError):
            raise
        raise ConstructionError(f"invalid size parameters for '{scheme}': {e}")
    raise ConstructionError(f"unknown scheme '{scheme}'")


def random_sampler(scheme: str, seed: int, **params: Any) -> Sampler:
    return construct(random_spec(scheme, seed, **params))


def size_params_for(universe: Universe, scheme: str) -> Dict[str, Any]:
    """Size parameters that make `scheme` live on `universe`, where that is possible."""
    if scheme in ("oddmul2w", "mulshift") and universe.kind == "pow2":
        return {"w": universe.param}
    if scheme in ("modprime", "affine2indep") and universe.kind == "prime":
        return {"p": universe.param}
    if scheme in ("parity", "fullyrandom"):
        return {"u": universe.size}
    raise UniverseError(f"scheme '{scheme}' cannot be sized for universe {universe.kind}({universe.param})")


def sample_vector(sampler: Sampler, n: Optional[int] = None) -> List[int]:
    """(Sample(0), ..., Sample(n-1)) as a list of bits."""
    n = sampler.universe_size if n is None else n
    return [sampler.sample(x) for x in range(n)]
