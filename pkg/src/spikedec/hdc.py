"""Binary hypervectors: generation, similarity measures, and capacity statistics.

Bits are stored packed into little-endian uint64 words (bit i of the vector is
bit ``i % 64`` of word ``i // 64``); padding bits past ``dims`` are always zero,
so XOR + popcount over whole words gives exact Hamming distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr, ndtr

from .errors import FormatError, MathError, ShapeError, ValidationError

RNG_NAME = "pcg64"  # np.random.default_rng; recorded in run metadata

CODEBOOK_MAGIC = b"HVCB"
CODEBOOK_VERSION = 1
_NO_SEED = 0xFFFFFFFFFFFFFFFF


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array into uint64 words (little bit order, zero padded)."""
    dims = bits.shape[-1]
    n_words = (dims + 63) // 64
    padded = np.zeros(bits.shape[:-1] + (n_words * 64,), dtype=np.uint8)
    padded[..., :dims] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return packed.view(np.uint64)


def _unpack_bits(words: np.ndarray, dims: int) -> np.ndarray:
    as_bytes = words.view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return bits[..., :dims]


@dataclass(frozen=True, eq=False)
class BinaryHypervector:
    """A D-dimensional bit vector compared by Hamming distance or cosine."""

    dims: int
    words: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dims < 1:
            raise ValidationError(f"hypervector needs at least 1 dimension, got {self.dims}")
        self.words.setflags(write=False)

    @classmethod
    def from_bits(cls, bits) -> "BinaryHypervector":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ShapeError(f"expected a 1-D bit sequence, got shape {bits.shape}")
        if bits.size and bits.max() > 1:
            raise ValidationError("bits must be 0 or 1")
        return cls(dims=bits.size, words=_pack_bits(bits))

    def to_bits(self) -> np.ndarray:
        return _unpack_bits(self.words, self.dims)

    def to_hex(self) -> str:
        return bytes(self.words.view(np.uint8)[: (self.dims + 7) // 8]).hex()

    def complement(self) -> "BinaryHypervector":
        return BinaryHypervector.from_bits(1 - self.to_bits())

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinaryHypervector)
            and self.dims == other.dims
            and np.array_equal(self.words, other.words)
        )


def generate(dims: int, seed: int) -> BinaryHypervector:
    """Draw each bit independently Bernoulli(0.5) from a seeded pcg64 stream."""
    if dims < 1:
        raise ValidationError(f"hypervector needs at least 1 dimension, got {dims}")
    rng = np.random.default_rng(seed)
    return BinaryHypervector.from_bits(rng.integers(0, 2, size=dims, dtype=np.uint8))


def random_bits(n: int, dims: int, rng: np.random.Generator) -> np.ndarray:
    """n fresh hypervectors as an [n, dims] 0/1 array drawn from ``rng``."""
    return rng.integers(0, 2, size=(n, dims), dtype=np.uint8)


def _check_dims(a: BinaryHypervector, b: BinaryHypervector):
    if a.dims != b.dims:
        raise ShapeError(f"dimension mismatch: {a.dims} vs {b.dims}")


def hamming(a: BinaryHypervector, b: BinaryHypervector) -> int:
    """Number of mismatching bits between two equal-width vectors."""
    _check_dims(a, b)
    return int(np.bitwise_count(a.words ^ b.words).sum())


def normalized_hamming(a: BinaryHypervector, b: BinaryHypervector) -> float:
    return hamming(a, b) / a.dims


def cosine(a: BinaryHypervector, b: BinaryHypervector, mode: str = "binary") -> float:
    """Cosine similarity on {0,1} values, or on {-1,+1} after mapping 0 to -1.

    In bipolar mode the identity cos = 1 - 2 * normalized_hamming holds exactly.
    """
    _check_dims(a, b)
    if mode == "binary":
        na, nb = a.popcount(), b.popcount()
        if na == 0 or nb == 0:
            raise MathError("binary cosine undefined for a zero vector")
        dot = int(np.bitwise_count(a.words & b.words).sum())
        return dot / math.sqrt(na * nb)
    if mode == "bipolar":
        return 1.0 - 2.0 * hamming(a, b) / a.dims
    raise ValidationError(f"unknown cosine mode {mode!r}")


# --- capacity statistics ----------------------------------------------------
#
# Two random vectors have Hamming distance ~ Normal(D/2, D/4); a pair counts as
# pseudo-orthogonal when the normalized distance is within 0.5 +/- 0.05, i.e.
# |Z| <= 0.1 sqrt(D).  Over N vectors, requiring at most one non-orthogonal
# pair gives (1-P) N (N-1) / 2 = 1 with P the in-bounds probability.


def orthogonality_probability(dims: int) -> float:
    """Probability that a random pair lands within the pseudo-orthogonal band."""
    if dims < 1:
        raise ValidationError("dims must be >= 1")
    z = 0.1 * math.sqrt(dims)
    return float(ndtr(z) - ndtr(-z))


def log_tail_probability(dims: int) -> float:
    """log(1 - P) for the band above, stable for any D (log-space normal tail)."""
    if dims < 1:
        raise ValidationError("dims must be >= 1")
    z = 0.1 * math.sqrt(dims)
    return math.log(2.0) + float(log_ndtr(-z))


def capacity(dims: int) -> int:
    """Largest vector count whose pairwise pseudo-orthogonality budget is one miss.

    Floor of the positive root of (1-P) N^2 - (1-P) N - 2 = 0, computed from
    the log-space tail so it survives 1-P underflowing double precision.
    """
    log_ratio = math.log(8.0) - log_tail_probability(dims)  # log(8 / (1-P))
    if log_ratio < 700.0:
        return math.floor((1.0 + math.sqrt(1.0 + math.exp(log_ratio))) / 2.0)
    # sqrt(1 + x) ~ sqrt(x) once x dwarfs 1; keep everything in log space
    log_n = log_ratio / 2.0 - math.log(2.0)
    if log_n < 700.0:
        return math.floor(math.exp(log_n))
    # beyond float range: build the integer from the base-10 exponent
    exp10 = log_n / math.log(10.0)
    whole = math.floor(exp10)
    mantissa = 10.0 ** (exp10 - whole)
    return round(mantissa * 10**15) * 10 ** (whole - 15)


def crossover_dimension(limit: int = 6000) -> int:
    """D at which capacity(D) catches back up with one-value-per-dimension.

    capacity(D) trails D over the mid range (a couple of tiny-D cases are
    degenerately at or above parity), so the boundary is the upward crossing:
    one past the largest scanned D with capacity(D) < D.
    """
    dims = np.arange(1, limit + 1, dtype=np.float64)
    z = 0.1 * np.sqrt(dims)
    log1mp = np.log(2.0) + log_ndtr(-z)
    n = np.floor((1.0 + np.sqrt(1.0 + np.exp(np.log(8.0) - log1mp))) / 2.0)
    below = np.nonzero(n < dims)[0]
    if below.size == 0:
        return 1
    crossing = int(below[-1]) + 2  # +1 for the 1-based D, +1 to step past it
    if crossing > limit:
        raise MathError(f"no crossover found below D={limit}")
    return crossing


# --- class codebooks ---------------------------------------------------------


@dataclass(frozen=True)
class ClassCodebook:
    """Ordered class-target hypervectors, all of equal width."""

    dims: int
    vectors: tuple[BinaryHypervector, ...]
    seed: int | None = None

    def __post_init__(self):
        for i, v in enumerate(self.vectors):
            if v.dims != self.dims:
                raise ShapeError(f"class {i} has {v.dims} dims, codebook declares {self.dims}")

    def __len__(self) -> int:
        return len(self.vectors)

    def __getitem__(self, idx: int) -> BinaryHypervector:
        return self.vectors[idx]

    @classmethod
    def generate(cls, n_classes: int, dims: int, seed: int) -> "ClassCodebook":
        """Draw class vectors sequentially from one seeded pcg64 stream."""
        if n_classes < 1:
            raise ValidationError("codebook needs at least one class")
        rng = np.random.default_rng(seed)
        bits = random_bits(n_classes, dims, rng)
        return cls(dims=dims, seed=seed, vectors=tuple(BinaryHypervector.from_bits(b) for b in bits))

    def bit_matrix(self) -> np.ndarray:
        """[n_classes, dims] 0/1 matrix view of the codebook."""
        return np.stack([v.to_bits() for v in self.vectors])

    def distances(self, hv: BinaryHypervector) -> np.ndarray:
        """Normalized Hamming distance from ``hv`` to every class vector."""
        if hv.dims != self.dims:
            raise ShapeError(f"dimension mismatch: {hv.dims} vs {self.dims}")
        words = np.stack([v.words for v in self.vectors])
        return np.bitwise_count(words ^ hv.words).sum(axis=1) / self.dims

    # binary file layout: magic, u16 version, u32 dims, u32 n_classes, u64 seed
    # (all ones = unseeded), then one packed little-bit-order row per class.

    def save(self, path) -> None:
        row_bytes = (self.dims + 7) // 8
        with open(path, "wb") as f:
            f.write(CODEBOOK_MAGIC)
            f.write(np.uint16(CODEBOOK_VERSION).tobytes())
            f.write(np.uint32(self.dims).tobytes())
            f.write(np.uint32(len(self.vectors)).tobytes())
            f.write(np.uint64(self.seed if self.seed is not None else _NO_SEED).tobytes())
            for v in self.vectors:
                f.write(bytes(v.words.view(np.uint8)[:row_bytes]))

    @classmethod
    def load(cls, path) -> "ClassCodebook":
        with open(path, "rb") as f:
            raw = f.read()
        if raw[:4] != CODEBOOK_MAGIC:
            raise FormatError(f"{path}: not a codebook file")
        version = int(np.frombuffer(raw, "<u2", 1, 4)[0])
        if version != CODEBOOK_VERSION:
            raise FormatError(f"{path}: unsupported codebook version {version}")
        dims = int(np.frombuffer(raw, "<u4", 1, 6)[0])
        n_classes = int(np.frombuffer(raw, "<u4", 1, 10)[0])
        seed_raw = int(np.frombuffer(raw, "<u8", 1, 14)[0])
        row_bytes = (dims + 7) // 8
        body = raw[22:]
        if len(body) != n_classes * row_bytes:
            raise FormatError(f"{path}: expected {n_classes * row_bytes} row bytes, found {len(body)}")
        vectors = []
        for i in range(n_classes):
            row = np.frombuffer(body, np.uint8, row_bytes, i * row_bytes)
            bits = np.unpackbits(row, bitorder="little")[:dims]
            vectors.append(BinaryHypervector.from_bits(bits))
        return cls(dims=dims, seed=None if seed_raw == _NO_SEED else seed_raw, vectors=tuple(vectors))

    def to_hex(self) -> str:
        """One hex row per class, for eyeballing codebooks in logs."""
        return "\n".join(f"{i}: {v.to_hex()}" for i, v in enumerate(self.vectors))
