"""Bit-string helpers.

Every channel, code and hash in this package exchanges bit strings as
one-dimensional ``numpy.uint8`` arrays whose entries are 0 or 1.  The
helpers here convert to and from that representation and enforce it.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

BitLike = Union[str, Iterable[int], np.ndarray]


def as_bits(value: BitLike) -> np.ndarray:
    """Return ``value`` as a validated 1-D uint8 array of 0/1 symbols.

    Strings are read as written, most-significant symbol first
    (``"1011"``).  Arrays are copied only when a dtype change is needed.
    """
    if isinstance(value, str):
        if value.strip("01"):
            raise ValueError(f"bit string may only contain '0' and '1': {value!r}")
        return np.frombuffer(value.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(value)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit string symbols must be 0 or 1")
    return arr.astype(np.uint8, copy=False)


def to_str(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


def zeros(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.uint8)


def random_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    return int(np.count_nonzero(a != b))


def weight(bits: np.ndarray) -> int:
    return int(np.count_nonzero(bits))


def support(bits: np.ndarray) -> frozenset:
    """Positions holding a 1."""
    return frozenset(np.flatnonzero(bits).tolist())


def to_int(bits: np.ndarray) -> int:
    """Interpret ``bits`` as a big-endian unsigned integer."""
    if len(bits) == 0:
        return 0
    packed = np.packbits(bits)
    return int.from_bytes(packed.tobytes(), "big") >> (8 * len(packed) - len(bits))


def from_int(value: int, length: int) -> np.ndarray:
    """Big-endian ``length``-bit representation of ``value``."""
    if value < 0 or value >> length:
        raise ValueError(f"{value} does not fit in {length} bits")
    if length == 0:
        return zeros(0)
    nbytes = (length + 7) // 8
    raw = np.frombuffer((value << (8 * nbytes - length)).to_bytes(nbytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[:length]
