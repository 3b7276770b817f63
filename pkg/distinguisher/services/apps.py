"""
Applications built on the distinguishers: matrix product verification,
stream equality testing and detection of edges leaving a vertex set.
"""
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import FrozenSet, Iterable, List, Sequence, Tuple, Union

import numpy as np

from distinguisher.errors import InputFormatError, ParameterSpaceError, ShapeError, UniverseError
from distinguisher.schemas import FreivaldVerdict, StreamTestResult, TreeTestResult, Universe
from distinguisher.services import monoid
from distinguisher.services.distinguish import (
    StreamAccumulator,
    ValueAssignment,
    VectorSampler,
    vector_sums,
)
from distinguisher.services.monoid import MASK64, MonoidValue
from distinguisher.services.samplers import random_sampler, size_params_for

logger = logging.getLogger(__name__)

WORD_SIZES = (8, 16, 32, 64)


def word_size_for(count: int) -> int:
    """Smallest standard word size w with 2^w >= count."""
    for w in WORD_SIZES:
        if 1 << w >= count:
            return w
    raise ParameterSpaceError(f"{count} keys do not fit a 64-bit word")


@dataclass
class Matrix:
    """Square matrix of 64-bit words; arithmetic wraps modulo 2^64."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.uint64)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ShapeError(f"matrix must be square, got shape {self.entries.shape}")
        if self.entries.shape[0] < 1:
            raise ShapeError("matrix dimension must be at least 1")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Matrix":
        return cls(np.array([[x & MASK64 for x in row] for row in rows], dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n, dtype=np.uint64))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.entries @ other.entries)


@dataclass
class Graph:
    vertices: int
    edges: List[Tuple[int, int]]
    tree: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.vertices < 0:
            raise ShapeError("vertex count must be non-negative")
        for i, (a, b) in enumerate(self.edges):
            if not (0 <= a < self.vertices and 0 <= b < self.vertices):
                raise UniverseError(f"edge {i} ({a}, {b}) references a vertex outside [{self.vertices}]")
        outside = [x for x in self.tree if not 0 <= x < self.vertices]
        if outside:
            raise UniverseError(f"tree vertices {sorted(outside)} outside [{self.vertices}]")
        self.tree = frozenset(self.tree)

    def endpoint_parity(self, i: int) -> int:
        """|e_i intersect T| mod 2; a self-loop counts its vertex twice."""
        a, b = self.edges[i]
        return ((a in self.tree) + (b in self.tree)) & 1


def _read_lines(source: Union[str, Path, Iterable[str]]) -> List[str]:
    if isinstance(source, (str, Path)):
        try:
            return Path(source).read_text().splitlines()
        except OSError as e:
            raise InputFormatError(f"cannot read {source}: {e}")
    return list(source)


def _ints(line: str, lineno: int) -> List[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise InputFormatError(f"line {lineno}: expected integers, got '{line.strip()}'")


def load_matrix(source: Union[str, Path, Iterable[str]]) -> Matrix:
    """First line n, then n lines of n decimal integers (negative values wrap)."""
    lines = [line for line in _read_lines(source) if line.strip()]
    if not lines:
        raise InputFormatError("empty matrix file")
    header = _ints(lines[0], 1)
    if len(header) != 1 or header[0] < 1:
        raise InputFormatError("first line must be the dimension n >= 1")
    n = header[0]
    if len(lines) != n + 1:
        raise InputFormatError(f"expected {n} rows, got {len(lines) - 1}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        row = _ints(line, lineno)
        if len(row) != n:
            raise InputFormatError(f"line {lineno}: expected {n} entries, got {len(row)}")
        rows.append(row)
    return Matrix.from_rows(rows)


def load_graph(source: Union[str, Path, Iterable[str]]) -> Graph:
    """First line "V E", then E lines "u v", then one line listing T (may be empty or missing)."""
    lines = _read_lines(source)
    if not lines or not lines[0].strip():
        raise InputFormatError("graph file must start with 'V E'")
    header = _ints(lines[0], 1)
    if len(header) != 2 or min(header) < 0:
        raise InputFormatError("first line must be 'V E' with non-negative counts")
    vertices, count = header
    if len(lines) < count + 1:
        raise InputFormatError(f"expected {count} edge lines, got {len(lines) - 1}")
    edges = []
    for lineno in range(2, count + 2):
        pair = _ints(lines[lineno - 1], lineno)
        if len(pair) != 2:
            raise InputFormatError(f"line {lineno}: an edge is 'u v'")
        edges.append((pair[0], pair[1]))
    rest = [line for line in lines[count + 1:] if line.strip()]
    if len(rest) > 1:
        raise InputFormatError("T must be listed on a single line")
    tree = _ints(rest[0], count + 2) if rest else []
    try:
        return Graph(vertices, edges, frozenset(tree))
    except UniverseError as e:
        raise InputFormatError(str(e))


def freivald_verify(a: Matrix, b: Matrix, c: Matrix, rounds: int, seed: int) -> FreivaldVerdict:
    """
    Test AB = C with d rounds of A(Bs) = Cs.

    Each round draws a fresh odd-multiply threshold sampler over keys 1..n
    and sets s_j = Sample(j + 1). A true product is always accepted;
    otherwise every round rejects with probability >= 1/8.

    Args:
        a, b, c: matrices of one dimension n
        rounds: number of rounds d >= 1
        seed: seed of the round generator

    Returns:
        FreivaldVerdict; rejecting_round counts from 1
    """
    if not a.n == b.n == c.n:
        raise ShapeError(f"dimension mismatch: {a.n}, {b.n}, {c.n}")
    if rounds < 1:
        raise ParameterSpaceError("rounds must be at least 1")
    n = a.n
    w = word_size_for(n + 1)
    rng = random.Random(seed)
    for r in range(1, rounds + 1):
        sampler = random_sampler("oddmul2w", rng.getrandbits(64), w=w)
        s = np.array([sampler.sample(j + 1) for j in range(n)], dtype=np.uint64)
        if not np.array_equal(a.entries @ (b.entries @ s), c.entries @ s):
            logger.debug("freivald round %d rejected", r)
            return FreivaldVerdict(verdict="reject", rejecting_round=r, rounds=rounds, n=n, w=w)
    return FreivaldVerdict(verdict="accept", rounds=rounds, n=n, w=w)


def stream_equal_test(
    stream: Iterable[Tuple[int, MonoidValue]],
    claimed: ValueAssignment,
    d: int,
    seed: int,
    scheme: str = "oddmul2w",
    **params,
) -> StreamTestResult:
    """
    Compare the d sampled sums of a stream with those of a claimed assignment.

    A mismatch proves the stream's values differ from the claim; a match is
    wrong with probability <= (7/8)^d. Size parameters default to the claim's
    universe.
    """
    if not params:
        params = size_params_for(claimed.universe, scheme)
    vs = VectorSampler.random(scheme, d, seed, **params)
    if vs.universe_size != claimed.universe.size:
        raise UniverseError("samplers do not cover the claimed universe")
    acc = StreamAccumulator(vs.samplers, claimed.tag)
    acc.update_many(stream)
    digests = acc.digest()
    expected, _ = vector_sums(vs, claimed)
    return StreamTestResult(
        equal_sofar=digests == expected,
        d=d,
        updates=acc.updates,
        digests=[monoid.format_value(x) for x in digests],
        claimed=[monoid.format_value(x) for x in expected],
    )


def tree_edge_test(g: Graph, d: int, seed: int) -> TreeTestResult:
    """
    Detect an edge with exactly one endpoint in T.

    Edge i is key i with F2 value |e_i intersect T| mod 2; the value vector is
    non-zero exactly when some edge leaves T, and d samplers see it with
    probability >= 1 - (7/8)^d.
    """
    w = word_size_for(max(1, len(g.edges)))
    parities = {i: g.endpoint_parity(i) for i in range(len(g.edges))}
    v = ValueAssignment.from_raw(Universe.power_of_two(w), monoid.F2, parities)
    vs = VectorSampler.random("oddmul2w", d, seed, w=w)
    _, all_zero = vector_sums(vs, v)
    return TreeTestResult(edge_leaving_detected=not all_zero, d=d, edges=len(g.edges), nonzero_edges=v.n)
