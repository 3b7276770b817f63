import json
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, TypeAdapter


def _parse_rational(v: Any) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"bad rational '{v}': {e}")
    raise ValueError(f"cannot read {type(v).__name__} as a rational")


def format_rational(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


# Exact rationals travel as "num/den" strings.
Rational = Annotated[
    Fraction,
    PlainValidator(_parse_rational),
    PlainSerializer(format_rational, return_type=str),
]


class Schema(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)


def to_json_line(model: BaseModel) -> str:
    """Compact JSON; json.loads + the same dumps call reproduces it byte for byte."""
    return json.dumps(model.model_dump(mode="json"), separators=(",", ":"))


# Universes
class Universe(Schema):
    kind: Literal["pow2", "prime", "range"]
    param: int = Field(..., ge=1, description="w for pow2, p for prime, u for range")

    @property
    def size(self) -> int:
        if self.kind == "pow2":
            return 1 << self.param
        return self.param

    @classmethod
    def power_of_two(cls, w: int) -> "Universe":
        return cls(kind="pow2", param=w)

    @classmethod
    def prime(cls, p: int) -> "Universe":
        return cls(kind="prime", param=p)

    @classmethod
    def of_range(cls, u: int) -> "Universe":
        return cls(kind="range", param=u)


# Sampler specs, one model per scheme, discriminated on `scheme`
class OddMul2wSpec(Schema):
    scheme: Literal["oddmul2w"] = "oddmul2w"
    w: int
    a: int
    t: int
    seed: Optional[int] = None


class ModPrimeSpec(Schema):
    scheme: Literal["modprime"] = "modprime"
    p: int
    a: int
    t: int
    seed: Optional[int] = None


class Affine2IndepSpec(Schema):
    scheme: Literal["affine2indep"] = "affine2indep"
    p: int
    a: int
    b: int
    t: int
    seed: Optional[int] = None


class PolyKIndepSpec(Schema):
    scheme: Literal["polykindep"] = "polykindep"
    field: Literal["mersenne", "gf2e"]
    field_param: int = Field(..., description="q for 2^q-1, e for GF(2^e)")
    coefficients: List[int] = Field(..., description="low degree first; k of them")
    output_rule: Literal["low_bit", "threshold"] = "low_bit"
    tau: Optional[int] = None
    seed: Optional[int] = None

    @property
    def k(self) -> int:
        return len(self.coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


class TabulationSpec(Schema):
    scheme: Literal["tabulation"] = "tabulation"
    c: int
    char_bits: int
    r: int
    tables: List[List[int]]
    bit: int = 0
    seed: Optional[int] = None


class MulShiftSpec(Schema):
    scheme: Literal["mulshift"] = "mulshift"
    w: int
    a: int
    seed: Optional[int] = None


class ParityConstrainedSpec(Schema):
    scheme: Literal["parity"] = "parity"
    u: int
    bits: str = Field(..., description="u characters '0'/'1'")
    seed: Optional[int] = None


Prop2Outcome = Literal["none", "all", "balanced"]


class Prop2CounterexampleSpec(Schema):
    scheme: Literal["prop2"] = "prop2"
    n: int
    positive_outcome: Prop2Outcome
    negative_outcome: Prop2Outcome
    positive_subset: List[int] = Field(default_factory=list)
    negative_subset: List[int] = Field(default_factory=list)
    seed: Optional[int] = None

    @property
    def u(self) -> int:
        return 4 * self.n

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, 4 * self.n)


class FullyRandomSpec(Schema):
    scheme: Literal["fullyrandom"] = "fullyrandom"
    u: int
    bits: str
    reject_empty: bool = False
    seed: Optional[int] = None


SamplerSpec = Annotated[
    Union[
        OddMul2wSpec,
        ModPrimeSpec,
        Affine2IndepSpec,
        PolyKIndepSpec,
        TabulationSpec,
        MulShiftSpec,
        ParityConstrainedSpec,
        Prop2CounterexampleSpec,
        FullyRandomSpec,
    ],
    Field(discriminator="scheme"),
]

sampler_spec_adapter = TypeAdapter(SamplerSpec)

THRESHOLD_SCHEMES = ("oddmul2w", "modprime", "affine2indep")


# Reports
class DistinguishReport(Schema):
    method: Literal["exhaustive", "montecarlo"]
    scheme: str
    universe_size: int
    monoid: str
    n: int
    probability: Rational
    good_total: Optional[int] = Field(None, description="sum of |GOOD| over all seeds")
    denominator: Optional[int] = Field(None, description="seed count times m, unreduced")
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    bound: Optional[Rational] = None
    holds: Optional[bool] = None
    label: Optional[str] = None


class LemmaCheckResult(Schema):
    name: str
    parameters: Dict[str, Any]
    lhs: Rational
    bound: Rational
    direction: Literal["upper", "lower", "strict_lower"]
    holds: bool


class SweepResult(Schema):
    name: str
    parameters: Dict[str, Any]
    checked: int
    violations: int
    first_violation: Optional[LemmaCheckResult] = None


class MomentReport(Schema):
    mode: Literal["exact_gf2e", "montecarlo"]
    n: int
    e_x2: Rational
    e_x4: Rational
    ratio: Rational
    pr_nonzero: Rational
    fourth_moment_ok: bool
    nonzero_ok: bool
    seed_space: Optional[int] = None
    trials: Optional[int] = None
    seed: Optional[int] = None


class CounterexampleResult(Schema):
    name: str
    claim: str
    probability: Rational
    expected: Rational
    holds: bool
    details: Dict[str, Any] = Field(default_factory=dict)


class CounterexampleReport(Schema):
    results: List[CounterexampleResult]

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.results)


class BenchSubject(Schema):
    name: str
    iterations: int
    total_ns: int
    ns_per_op: float


class BenchReport(Schema):
    subjects: List[BenchSubject]
    environment: str
    seed: int
    sink: int = Field(..., description="anti-dead-code accumulator")
    poly_to_threshold_ratio: float
    soft_ratio_ok: bool


class FreivaldVerdict(Schema):
    verdict: Literal["accept", "reject"]
    rejecting_round: Optional[int] = None
    rounds: int
    n: int
    w: int


class StreamTestResult(Schema):
    equal_sofar: bool
    d: int
    updates: int
    digests: List[str]
    claimed: List[str]


class TreeTestResult(Schema):
    edge_leaving_detected: bool
    d: int
    edges: int
    nonzero_edges: int


class SmallBiasReport(Schema):
    d: int
    epsilon: float
    keys: List[int]
    draws: int
    odd_fraction: Rational
    low: float
    high: float
    holds: bool
    seed: int


# Command envelope
class CommandResult(BaseModel):
    ok: bool
    data: Optional[Any] = None
    error: Optional[str] = None
    failed_checks: int = 0
    text: Optional[str] = Field(None, description="rendered human-readable table")


# Corpus recipes, expanded deterministically by services.corpus
class PrefixOnesRecipe(Schema):
    kind: Literal["prefix_ones"] = "prefix_ones"
    sizes: List[int]


class MsbPairsRecipe(Schema):
    kind: Literal["msb_pairs"] = "msb_pairs"
    pairs: List[List[int]]


class RandomRecipe(Schema):
    kind: Literal["random"] = "random"
    monoid: str
    count: int = Field(..., ge=1)
    seed: int
    max_n: int = Field(..., ge=1)
    values: Literal["bits", "small_signed", "full"] = "bits"


CorpusRecipe = Annotated[
    Union[PrefixOnesRecipe, MsbPairsRecipe, RandomRecipe],
    Field(discriminator="kind"),
]


class CorpusFile(Schema):
    version: int
    w: int = Field(..., ge=2, le=16, description="keys are drawn from [2^w]")
    recipes: List[CorpusRecipe]
