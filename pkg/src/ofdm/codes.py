"""Binary codes over BPSK: sources, enumeration, weight/distance distributions.

Bits map to symbols as 0 -> +1 and 1 -> -1, so the binary all-one word is the
all-negative symbol word.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from src.ofdm.errors import CodeSizeError
from src.ofdm.signal_core import Codeword, peak_magnitudes

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 2**20
# binomial coefficients up to this N still fit in a double
BINOMIAL_FLOAT_LIMIT = 1000


class CodeKind(str, Enum):
    UNCODED = "uncoded"
    GENERATOR = "generator"
    EXPLICIT = "explicit"


def bits_to_symbols(bits: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def gf2_rank(matrix: np.ndarray) -> int:
    rows = (np.asarray(matrix, dtype=np.uint8) & 1).copy()
    if rows.ndim != 2:
        raise ValueError("Generator matrix must be two-dimensional")
    rank = 0
    n_rows, n_cols = rows.shape
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if rows[r, col]), None)
        if pivot is None:
            continue
        rows[[rank, pivot]] = rows[[pivot, rank]]
        below = np.nonzero(rows[:, col])[0]
        for r in below:
            if r != rank:
                rows[r] ^= rows[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass(frozen=True)
class CodeSpec:
    kind: CodeKind
    n: int
    generator: np.ndarray | None = None
    words: np.ndarray | None = None

    @classmethod
    def uncoded(cls, n: int) -> CodeSpec:
        if n < 1:
            raise ValueError(f"N must be >= 1, got {n}")
        return cls(kind=CodeKind.UNCODED, n=n)

    @classmethod
    def from_generator(cls, matrix: np.ndarray) -> CodeSpec:
        generator = np.array(matrix, dtype=np.uint8)
        if generator.ndim != 2 or generator.shape[0] == 0 or generator.shape[1] == 0:
            raise ValueError("Generator matrix must be a non-empty k_b x N array")
        if np.any(generator > 1):
            raise ValueError("Generator matrix entries must be 0 or 1")
        k_b, n = generator.shape
        if k_b > n:
            raise ValueError(f"Generator has more rows ({k_b}) than columns ({n})")
        rank = gf2_rank(generator)
        if rank != k_b:
            raise ValueError(f"Generator matrix is rank deficient over GF(2): rank {rank} < {k_b} rows")
        generator.setflags(write=False)
        return cls(kind=CodeKind.GENERATOR, n=n, generator=generator)

    @classmethod
    def explicit(cls, words: np.ndarray | list[Codeword]) -> CodeSpec:
        if isinstance(words, list):
            if not words:
                raise ValueError("Explicit code must contain at least one codeword")
            array = np.stack([word.symbols for word in words])
        else:
            array = np.array(words, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] == 0:
            raise ValueError("Explicit code must be a non-empty M x N array")
        if not np.all(np.abs(array) == 1.0):
            raise ValueError("Codeword symbols must be +1 or -1")
        if np.unique(array, axis=0).shape[0] != array.shape[0]:
            raise ValueError("Explicit code contains duplicate codewords")
        array.setflags(write=False)
        return cls(kind=CodeKind.EXPLICIT, n=array.shape[1], words=array)

    @classmethod
    def repetition(cls, n: int) -> CodeSpec:
        return cls.from_generator(np.ones((1, n), dtype=np.uint8))

    @classmethod
    def parity(cls, n: int) -> CodeSpec:
        """Even-weight code: [I | 1] generator with N-1 information bits."""
        if n < 2:
            raise ValueError("Parity code needs N >= 2")
        generator = np.concatenate(
            [np.eye(n - 1, dtype=np.uint8), np.ones((n - 1, 1), dtype=np.uint8)], axis=1
        )
        return cls.from_generator(generator)

    @property
    def is_linear(self) -> bool:
        return self.kind in (CodeKind.UNCODED, CodeKind.GENERATOR)

    @property
    def k_b(self) -> float:
        if self.kind is CodeKind.UNCODED:
            return float(self.n)
        if self.kind is CodeKind.GENERATOR:
            return float(self.generator.shape[0])
        return math.log2(self.words.shape[0])

    @property
    def size(self) -> int:
        if self.kind is CodeKind.EXPLICIT:
            return int(self.words.shape[0])
        return 2 ** int(self.k_b)

    @property
    def rate(self) -> float:
        return self.k_b / self.n


def load_generator(path: Path) -> np.ndarray:
    """Read a generator matrix: one row of '0'/'1' per line, '#' lines ignored."""
    rows: list[list[int]] = []
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if set(line) - {"0", "1"}:
                raise ValueError(f"{path}:{lineno}: generator rows may only contain '0' and '1'")
            if rows and len(line) != len(rows[0]):
                raise ValueError(f"{path}:{lineno}: row length {len(line)} differs from {len(rows[0])}")
            rows.append([int(ch) for ch in line])
    if not rows:
        raise ValueError(f"{path}: no generator rows found")
    return np.array(rows, dtype=np.uint8)


def _message_bits(k_b: int, count: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    if rng is None:
        index = np.arange(2**k_b, dtype=np.int64)
        return ((index[:, None] >> np.arange(k_b)[None, :]) & 1).astype(np.uint8)
    return rng.integers(0, 2, size=(count, k_b), dtype=np.uint8)


def _encode(bits: np.ndarray, generator: np.ndarray) -> np.ndarray:
    return (bits.astype(np.int64) @ generator.astype(np.int64)) & 1


def sample_symbols(spec: CodeSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` codewords drawn uniformly from the code, as a (count, N) symbol array."""
    if spec.kind is CodeKind.UNCODED:
        return bits_to_symbols(_message_bits(spec.n, count, rng))
    if spec.kind is CodeKind.GENERATOR:
        bits = _message_bits(spec.generator.shape[0], count, rng)
        return bits_to_symbols(_encode(bits, spec.generator))
    index = rng.integers(0, spec.words.shape[0], size=count)
    return np.array(spec.words[index], dtype=np.float64)


def sample_codeword(spec: CodeSpec, rng: np.random.Generator) -> Codeword:
    return Codeword(sample_symbols(spec, rng, 1)[0])


def enumerate_symbols(spec: CodeSpec, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    if spec.size > limit:
        raise CodeSizeError(spec.size, limit)
    if spec.kind is CodeKind.UNCODED:
        return bits_to_symbols(_message_bits(spec.n))
    if spec.kind is CodeKind.GENERATOR:
        return bits_to_symbols(_encode(_message_bits(spec.generator.shape[0]), spec.generator))
    return np.array(spec.words, dtype=np.float64)


def enumerate_code(spec: CodeSpec, limit: int = ENUMERATION_LIMIT) -> list[Codeword]:
    return [Codeword(row) for row in enumerate_symbols(spec, limit)]


@dataclass(frozen=True)
class DistanceDistribution:
    counts: np.ndarray
    m1: int
    flavor: str = "distance"
    log_counts: np.ndarray | None = None

    @property
    def n(self) -> int:
        return int(self.counts.size - 1)

    @property
    def total(self) -> float:
        return float(np.sum(self.counts))

    @property
    def is_symmetric(self) -> bool:
        if self.log_counts is not None:
            return bool(np.allclose(self.log_counts, self.log_counts[::-1], rtol=0.0, atol=1e-9))
        return bool(np.array_equal(self.counts, self.counts[::-1]))

    def log_weights(self) -> np.ndarray:
        """log W_k, -inf where W_k = 0; finite even when W_k overflows a double."""
        if self.log_counts is not None:
            return self.log_counts
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.counts, dtype=np.float64))


def _as_symbol_array(code: list[Codeword] | np.ndarray) -> np.ndarray:
    if isinstance(code, list):
        if not code:
            raise ValueError("Code must contain at least one codeword")
        return np.stack([word.symbols for word in code])
    array = np.asarray(code, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] == 0:
        raise ValueError("Code must contain at least one codeword")
    return array


def distance_distribution(code: list[Codeword] | np.ndarray, chunk_pairs: int = 2**22) -> DistanceDistribution:
    """W_k° over all ordered pairs (including each word with itself), divided by M1."""
    words = _as_symbol_array(code)
    m1, n = words.shape
    pair_counts = np.zeros(n + 1, dtype=np.int64)
    rows = max(1, chunk_pairs // m1)
    for start in range(0, m1, rows):
        inner = words[start : start + rows] @ words.T
        # d = (N - <c', c''>) / 2 for +-1 words
        distances = np.rint((n - inner) / 2.0).astype(np.int64)
        pair_counts += np.bincount(distances.ravel(), minlength=n + 1)
    return DistanceDistribution(counts=pair_counts / m1, m1=m1, flavor="distance")


def weight_distribution(spec: CodeSpec) -> DistanceDistribution:
    """W_k = number of codewords with k symbols equal to -1; linear codes only."""
    if not spec.is_linear:
        raise ValueError("Weight distribution requires a linear code (uncoded or generator)")
    if spec.kind is CodeKind.UNCODED:
        n = spec.n
        if n <= BINOMIAL_FLOAT_LIMIT:
            counts = np.array([float(math.comb(n, k)) for k in range(n + 1)])
            return DistanceDistribution(counts=counts, m1=spec.size, flavor="weight")
        ks = np.arange(n + 1)
        log_counts = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
        with np.errstate(over="ignore"):
            counts = np.exp(log_counts)
        return DistanceDistribution(counts=counts, m1=spec.size, flavor="weight", log_counts=log_counts)
    words = enumerate_symbols(spec)
    weights = np.count_nonzero(words < 0, axis=1)
    counts = np.bincount(weights, minlength=spec.n + 1).astype(np.float64)
    return DistanceDistribution(counts=counts, m1=spec.size, flavor="weight")


def check_wcond(dist: DistanceDistribution, k_b: float) -> float:
    """Smallest C_w >= 0 with W_k° <= (1 + C_w) binom(N, k) / 2^(N - k_b) for all k."""
    n = dist.n
    counts = np.asarray(dist.counts, dtype=np.float64)
    ks = np.nonzero(counts > 0)[0]
    if ks.size == 0:
        return 0.0
    if n <= BINOMIAL_FLOAT_LIMIT:
        binoms = np.array([float(math.comb(n, int(k))) for k in ks])
        worst = float(np.max(counts[ks] * (2.0 ** (n - k_b)) / binoms))
    else:
        log_binoms = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
        log_ratio = float(np.max(dist.log_weights()[ks] + (n - k_b) * math.log(2.0) - log_binoms))
        worst = math.exp(log_ratio) if log_ratio < 700 else math.inf
    return max(0.0, worst - 1.0)


def contains_all_negative(code: list[Codeword] | np.ndarray) -> bool:
    words = _as_symbol_array(code)
    return bool(np.any(np.all(words == -1.0, axis=1)))


def symmetrize(code: list[Codeword] | np.ndarray) -> np.ndarray:
    """C_A united with C_B, where C_B negates every symbol of every word of C_A."""
    words = _as_symbol_array(code)
    return np.unique(np.concatenate([words, -words]), axis=0)


@dataclass(frozen=True)
class Lemma1Report:
    ratio_a: float
    ratio_ab: float
    lower_holds: bool
    upper_holds: bool
    exceed_a: int
    exceed_ab: int

    @property
    def holds(self) -> bool:
        return self.lower_holds and self.upper_holds


def verify_lemma1(code_a: list[Codeword] | np.ndarray, x: float, oversampling: int) -> Lemma1Report:
    """Check |A|/|C_A| <= 2|A u B|/|C_A u C_B| <= 4|A|/|C_A| by enumeration."""
    words_a = np.unique(_as_symbol_array(code_a), axis=0)
    union = symmetrize(words_a)
    exceed_a = int(np.count_nonzero(peak_magnitudes(words_a, oversampling) > x))
    exceed_ab = int(np.count_nonzero(peak_magnitudes(union, oversampling) > x))
    ratio_a = exceed_a / words_a.shape[0]
    ratio_ab = exceed_ab / union.shape[0]
    if exceed_a == 0:
        lower = upper = True
    else:
        # integer cross-multiplication keeps the comparison exact
        lower = exceed_a * union.shape[0] <= 2 * exceed_ab * words_a.shape[0]
        upper = 2 * exceed_ab * words_a.shape[0] <= 4 * exceed_a * union.shape[0]
    logger.debug("lemma1: |A|=%d |C_A|=%d |AuB|=%d |C_AuC_B|=%d", exceed_a, words_a.shape[0], exceed_ab, union.shape[0])
    return Lemma1Report(
        ratio_a=ratio_a,
        ratio_ab=ratio_ab,
        lower_holds=bool(lower),
        upper_holds=bool(upper),
        exceed_a=exceed_a,
        exceed_ab=exceed_ab,
    )


def wcond_constant(spec: CodeSpec) -> float:
    """C_w for a code spec; uncoded BPSK is the full space and has C_w = 0."""
    if spec.kind is CodeKind.UNCODED:
        return 0.0
    if spec.kind is CodeKind.GENERATOR:
        return check_wcond(weight_distribution(spec), spec.k_b)
    return check_wcond(distance_distribution(enumerate_symbols(spec)), spec.k_b)
