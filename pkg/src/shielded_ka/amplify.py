"""Toeplitz universal hashing, privacy amplification and transcript digests.

A family member maps ``n_h`` input bits to ``t1`` output bits through a
``t1 x n_h`` Toeplitz matrix over GF(2).  The matrix is determined by its
``n_h + t1 - 1`` diagonals, which form the public seed (the hash id):

    T[i, j] = seed[i - j + n_h - 1]

For any fixed pair of distinct inputs, a uniformly random seed makes them
collide with probability exactly ``2**-t1``.

The same family hashes the public transcript incrementally, one message at
a time, with ``x_{k+1} = h(x_k || m_{k+1})`` starting from the all-zero
state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bits import as_bits, from_int, random_bits, to_int


@dataclass(frozen=True)
class HashId:
    """Identifier of one Toeplitz hash: the seed plus the matrix shape.

    On the wire only the seed travels, as ``seed_length`` bits, most
    significant first; the shape is fixed by the protocol configuration.
    """

    seed: int
    input_length: int
    output_length: int

    def __post_init__(self):
        if self.output_length < 1 or self.input_length < 1:
            raise ValueError("hash dimensions must be positive")
        if self.seed < 0 or self.seed >> self.seed_length:
            raise ValueError(f"seed does not fit in {self.seed_length} bits")

    @property
    def seed_length(self) -> int:
        return self.input_length + self.output_length - 1

    def to_bits(self) -> np.ndarray:
        return from_int(self.seed, self.seed_length)

    @classmethod
    def from_bits(cls, bits, input_length: int, output_length: int) -> "HashId":
        bits = as_bits(bits)
        if len(bits) != input_length + output_length - 1:
            raise ValueError(f"hash id must have {input_length + output_length - 1} bits, got {len(bits)}")
        return cls(to_int(bits), input_length, output_length)


@dataclass(frozen=True)
class HashFamily:
    input_length: int
    output_length: int

    @property
    def seed_length(self) -> int:
        return self.input_length + self.output_length - 1

    def select(self, rng: np.random.Generator) -> HashId:
        return select_hash(rng, self.input_length, self.output_length)


def toeplitz_matrix(hash_id: HashId) -> np.ndarray:
    n, m = hash_id.input_length, hash_id.output_length
    seed = hash_id.to_bits()
    idx = np.arange(m)[:, None] - np.arange(n)[None, :] + (n - 1)
    return seed[idx]


class ToeplitzHash:
    """Evaluates one family member; rows are kept as Python integers."""

    def __init__(self, hash_id: HashId):
        self.id = hash_id
        self.matrix = toeplitz_matrix(hash_id)
        self._rows = [to_int(row) for row in self.matrix]

    def apply_int(self, x: int) -> int:
        """Hash an ``input_length``-bit big-endian integer to an integer."""
        out = 0
        for row in self._rows:
            out = (out << 1) | ((row & x).bit_count() & 1)
        return out

    def __call__(self, bits) -> np.ndarray:
        bits = as_bits(bits)
        n = self.id.input_length
        if len(bits) > n:
            raise ValueError(f"input of {len(bits)} bits exceeds the hash input length {n}")
        x = to_int(bits) << (n - len(bits))
        return from_int(self.apply_int(x), self.id.output_length)


@lru_cache(maxsize=64)
def toeplitz_hash(hash_id: HashId) -> ToeplitzHash:
    return ToeplitzHash(hash_id)


def select_hash(rng: np.random.Generator, input_length: int, output_length: int) -> HashId:
    """Draw a uniformly random family member, one generator draw per seed bit."""
    seed = random_bits(input_length + output_length - 1, rng)
    return HashId(to_int(seed), input_length, output_length)


def apply_hash(hash_id: HashId, bits) -> np.ndarray:
    """Toeplitz product over GF(2).  Short inputs are zero-padded at the end."""
    return toeplitz_hash(hash_id)(bits)


def amplify(shared, hash_id: HashId, output_length: int) -> np.ndarray:
    """Compress the reconciled string to a ``output_length``-bit key."""
    shared = as_bits(shared)
    t1 = hash_id.output_length
    if output_length > t1:
        raise ValueError(f"key length {output_length} exceeds hash output length {t1}")
    if t1 > len(shared):
        raise ValueError(f"hash output length {t1} exceeds the {len(shared)} shared bits")
    return apply_hash(hash_id, shared)[:output_length]


def hash_many(seeds: np.ndarray, inputs: np.ndarray, output_length: int) -> np.ndarray:
    """Vectorised Toeplitz hashing: row ``k`` of ``inputs`` under seed row ``k``.

    ``seeds`` has shape ``(N, n + m - 1)`` and ``inputs`` shape ``(N, n)``.
    """
    seeds = np.asarray(seeds, dtype=np.uint8)
    inputs = np.asarray(inputs, dtype=np.uint8)
    n = inputs.shape[1]
    if seeds.shape != (inputs.shape[0], n + output_length - 1):
        raise ValueError("seed array shape does not match inputs and output length")
    # out[:, i] = sum_k seed[:, i + k] * x[:, n - 1 - k]
    windows = sliding_window_view(seeds, n, axis=1)
    # uint8 accumulation wraps mod 256, which preserves parity
    return np.einsum("rik,rk->ri", windows, inputs[:, ::-1]) & 1


@dataclass(frozen=True)
class TranscriptDigest:
    """Rolling hash of the public transcript.

    Each message is extended with a single 1 and then zeros up to a multiple
    of ``input_length - output_length`` bits; each chunk is hashed together
    with the running state.  The 1-marker keeps messages that differ only in
    trailing zeros apart.
    """

    state: int = 0
    length: int = 32
    messages_absorbed: int = 0

    @classmethod
    def initial(cls, output_length: int) -> "TranscriptDigest":
        return cls(0, output_length, 0)

    @property
    def bits(self) -> np.ndarray:
        return from_int(self.state, self.length)

    def absorb(self, hash_id: HashId, msg) -> "TranscriptDigest":
        return transcript_absorb(self, hash_id, msg)


def transcript_absorb(digest: TranscriptDigest, hash_id: HashId, msg) -> TranscriptDigest:
    t1, n_h = hash_id.output_length, hash_id.input_length
    if digest.length != t1:
        raise ValueError("digest width does not match the hash output length")
    chunk = n_h - t1
    if chunk < 1:
        raise ValueError("hash input must be longer than its output to absorb messages")
    msg = as_bits(msg)
    data = (to_int(msg) << 1) | 1
    size = len(msg) + 1
    pad = -size % chunk
    data <<= pad
    size += pad
    h = toeplitz_hash(hash_id)
    mask = (1 << chunk) - 1
    x = digest.state
    for shift in range(size - chunk, -1, -chunk):
        x = h.apply_int((x << chunk) | ((data >> shift) & mask))
    return TranscriptDigest(x, t1, digest.messages_absorbed + 1)


def digest_transcript(hash_id: HashId, messages: Iterable[np.ndarray]) -> TranscriptDigest:
    digest = TranscriptDigest.initial(hash_id.output_length)
    for msg in messages:
        digest = transcript_absorb(digest, hash_id, msg)
    return digest
