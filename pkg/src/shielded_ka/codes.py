"""Unidirectional error-detecting codes.

A code is unidirectional when no codeword's support is contained in the
support of another codeword.  Combined with on-off keying, where an
adversary can only turn 0s into 1s, any alteration of a codeword then
produces a word that is not a codeword and is rejected.

Two instances are provided: the Manchester code (``1 -> 10``, ``0 -> 01``)
and the Berger code (source word followed by the complemented binary
weight).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .bits import as_bits, from_int, to_int

MAX_ENUMERATION_LENGTH = 16


class CodewordRejected(ValueError):
    """A received word is not a codeword; treated as detected tampering."""


class UnidirectionalCode:
    """Base class: an injective encoding rule plus its verify/decode rule."""

    source_length: int
    codeword_length: int
    name = "code"

    def encode(self, src) -> np.ndarray:
        raise NotImplementedError

    def verify(self, word) -> np.ndarray:
        """Return the source word, or raise :class:`CodewordRejected`."""
        raise NotImplementedError

    def accepts(self, word) -> bool:
        try:
            self.verify(word)
        except CodewordRejected:
            return False
        return True

    def _check_source(self, src) -> np.ndarray:
        src = as_bits(src)
        if len(src) != self.source_length:
            raise ValueError(f"{self.name} expects {self.source_length}-bit source words, got {len(src)}")
        return src

    def __repr__(self):
        return f"{type(self).__name__}(source_length={self.source_length})"


def manchester_encode(src) -> np.ndarray:
    src = as_bits(src)
    out = np.empty(2 * len(src), dtype=np.uint8)
    out[0::2] = src
    out[1::2] = 1 - src
    return out


def manchester_verify(word) -> np.ndarray:
    """Decode a Manchester word; reject odd lengths and ``00``/``11`` pairs."""
    word = as_bits(word)
    if len(word) % 2:
        raise CodewordRejected("Manchester word of odd length")
    first, second = word[0::2], word[1::2]
    if np.any(first == second):
        raise CodewordRejected("invalid Manchester symbol pair")
    return first.copy()


class ManchesterCode(UnidirectionalCode):
    name = "manchester"

    def __init__(self, source_length: int):
        self.source_length = int(source_length)
        self.codeword_length = 2 * self.source_length

    def encode(self, src) -> np.ndarray:
        return manchester_encode(self._check_source(src))

    def verify(self, word) -> np.ndarray:
        word = as_bits(word)
        if len(word) != self.codeword_length:
            raise CodewordRejected(f"expected {self.codeword_length} bits, got {len(word)}")
        return manchester_verify(word)


@dataclass(frozen=True)
class BergerParams:
    """Berger code dimensions.

    The weight of an ``l``-bit word ranges over ``0..l`` and so needs
    ``ceil(log2(l + 1))`` check bits, which is ``l.bit_length()``.
    """

    l: int

    def __post_init__(self):
        if self.l < 0:
            raise ValueError("source length must be non-negative")

    @property
    def r(self) -> int:
        return int(self.l).bit_length()

    @property
    def n(self) -> int:
        return self.l + self.r


def _berger_tail(head: np.ndarray, r: int) -> np.ndarray:
    return 1 - from_int(int(np.count_nonzero(head)), r)


def berger_encode(src, params: BergerParams) -> np.ndarray:
    src = as_bits(src)
    if len(src) != params.l:
        raise ValueError(f"Berger source must have {params.l} bits, got {len(src)}")
    return np.concatenate([src, _berger_tail(src, params.r)])


def berger_verify(word, params: BergerParams) -> np.ndarray:
    word = as_bits(word)
    if len(word) != params.n:
        raise CodewordRejected(f"expected {params.n} bits, got {len(word)}")
    head, tail = word[: params.l], word[params.l :]
    if not np.array_equal(tail, _berger_tail(head, params.r)):
        raise CodewordRejected("Berger check bits do not match the complemented weight")
    return head.copy()


class BergerCode(UnidirectionalCode):
    name = "berger"

    def __init__(self, source_length: int):
        self.params = BergerParams(int(source_length))
        self.source_length = self.params.l
        self.codeword_length = self.params.n

    def encode(self, src) -> np.ndarray:
        return berger_encode(self._check_source(src), self.params)

    def verify(self, word) -> np.ndarray:
        return berger_verify(word, self.params)


class TableCode(UnidirectionalCode):
    """An arbitrary encoding rule given as a function, decoded by table lookup.

    Intended for small experiments with candidate codes, including ones that
    are *not* unidirectional; :func:`check_non_inclusive_supports` decides.
    """

    name = "table"

    def __init__(self, source_length: int, codeword_length: int, rule: Callable[[np.ndarray], np.ndarray]):
        self.source_length = int(source_length)
        self.codeword_length = int(codeword_length)
        self._rule = rule
        self._table: Optional[Dict[bytes, np.ndarray]] = None

    def encode(self, src) -> np.ndarray:
        word = as_bits(self._rule(self._check_source(src)))
        if len(word) != self.codeword_length:
            raise ValueError("encoding rule produced a word of the wrong length")
        return word

    def verify(self, word) -> np.ndarray:
        if self._table is None:
            self._table = {}
            for value in range(2**self.source_length):
                src = from_int(value, self.source_length)
                self._table.setdefault(self.encode(src).tobytes(), src)
        found = self._table.get(as_bits(word).tobytes())
        if found is None:
            raise CodewordRejected("not a codeword")
        return found.copy()


def _codeword_table(code: UnidirectionalCode) -> np.ndarray:
    if code.source_length > MAX_ENUMERATION_LENGTH:
        raise ValueError(
            f"source length {code.source_length} exceeds the enumeration bound {MAX_ENUMERATION_LENGTH}"
        )
    if code.codeword_length > 63:
        raise ValueError("codewords longer than 63 bits cannot be enumerated as machine integers")
    words = [to_int(code.encode(from_int(v, code.source_length))) for v in range(2**code.source_length)]
    return np.array(words, dtype=np.int64)


def is_injective(code: UnidirectionalCode) -> bool:
    words = _codeword_table(code)
    return len(np.unique(words)) == len(words)


def check_non_inclusive_supports(code: UnidirectionalCode, chunk: int = 256) -> bool:
    """Exhaustively check that no two distinct codewords have nested supports.

    All ``2**l`` source words are encoded; for every ordered pair of distinct
    codewords ``(c, c')`` the test ``c & ~c' == 0`` detects
    ``supp(c) ⊂ supp(c')``.
    """
    words = np.unique(_codeword_table(code))
    for start in range(0, len(words), chunk):
        rows = words[start : start + chunk, None]
        contained = (rows & ~words[None, :]) == 0
        contained &= rows != words[None, :]
        if contained.any():
            return False
    return True
