"""Cascade information reconciliation.

B holds a noisy copy of A's string and corrects it toward A's by comparing
block parities.  Pass ``j`` (0-based) partitions the positions into blocks
of ``k1 * 2**j`` bits; passes after the first use a permutation drawn from
a public per-pass seed.  A block whose parities differ holds an odd number
of errors and is narrowed down by binary search to one error, which B
flips.  Each flip also toggles the parity of the blocks containing that
position in every earlier pass, which may expose further errors there
(the "cascade").

:class:`CascadeSession` is the scheduling logic with no I/O: it says which
index sets need a parity comparison next and digests the answers.  Both
protocol parties run one; :func:`run_cascade` drives a single session with
direct access to both strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .bits import as_bits, from_int

SEED_BITS = 64


class CascadeError(RuntimeError):
    """Raised when the parity answers are inconsistent with any error pattern."""


def block_parity(bits, start: int, stop: int) -> int:
    bits = as_bits(bits)
    if not 0 <= start <= stop <= len(bits):
        raise IndexError(f"block [{start}, {stop}) outside a string of length {len(bits)}")
    return int(np.bitwise_xor.reduce(bits[start:stop])) if stop > start else 0


def parities(bits: np.ndarray, index_sets: Sequence[np.ndarray]) -> np.ndarray:
    """Parity of ``bits`` over each index set."""
    return np.array([int(bits[idx].sum()) & 1 for idx in index_sets], dtype=np.uint8)


def binary_search_correct(
    a_view: Callable[[np.ndarray], int],
    b_bits: np.ndarray,
    block: Tuple[int, int],
    msgs: Optional[list] = None,
) -> int:
    """Locate and flip one error inside ``block`` by halving.

    ``a_view`` answers A's parity over an index array.  Every exchanged
    parity pair is appended to ``msgs`` as ``(b_parity, a_parity)``.  The
    caller must have established that the block parities differ.  Returns
    the corrected position; ``b_bits`` is modified in place.
    """
    start, stop = block
    idx = np.arange(start, stop)
    if len(idx) == 0:
        raise ValueError("cannot search an empty block")
    while len(idx) > 1:
        left = idx[: len(idx) // 2]
        b_par = int(b_bits[left].sum()) & 1
        a_par = int(a_view(left))
        if msgs is not None:
            msgs.append((b_par, a_par))
        idx = left if a_par != b_par else idx[len(idx) // 2 :]
    pos = int(idx[0])
    b_bits[pos] ^= 1
    return pos


def default_initial_block_size(p_est: float, n: Optional[int] = None, min_blocks: int = 1) -> int:
    """``ceil(0.73 / p_est)``, optionally capped so pass 1 has ``min_blocks`` blocks."""
    if p_est > 0:
        k1 = math.ceil(0.73 / p_est)
    elif n is not None:
        k1 = n
    else:
        raise ValueError("p_est = 0 needs the string length to size blocks")
    if n is not None:
        k1 = min(k1, math.ceil(n / min_blocks))
    return max(1, int(k1))


def pass_permutation(seed: int, n: int) -> np.ndarray:
    return np.random.default_rng(seed).permutation(n)


@dataclass(frozen=True)
class CascadeConfig:
    passes: int = 4
    initial_block_size: int = 8
    shuffle_seeds: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.passes < 1:
            raise ValueError("passes must be >= 1")
        if self.initial_block_size < 1:
            raise ValueError("initial block size must be >= 1")
        if self.shuffle_seeds and len(self.shuffle_seeds) < self.passes - 1:
            raise ValueError(f"{self.passes} passes need {self.passes - 1} shuffle seeds")

    def seed_for(self, pass_index: int) -> int:
        """Seed of pass ``pass_index`` (>= 1); derived from the index when none were given."""
        if self.shuffle_seeds:
            return int(self.shuffle_seeds[pass_index - 1])
        return int(np.random.SeedSequence(pass_index).generate_state(1, np.uint64)[0])

    def block_size(self, pass_index: int, n: int) -> int:
        return max(1, min(n, self.initial_block_size << pass_index))


class CascadeSession:
    """Parity-comparison scheduler shared by both sides of a Cascade run.

    Drive it with :meth:`next_request`:

    * ``("seed", j)`` -- the permutation seed of pass ``j`` must be agreed;
      call :meth:`start_pass` with it;
    * ``("query", index_sets)`` -- both sides compute parities over the
      index sets; call :meth:`absorb` with B's and then A's answers;
    * ``("done", None)`` -- reconciliation is over.

    :meth:`absorb` returns the positions B must flip.  Sets inside one query
    are always disjoint, so a whole batch of binary searches advances one
    level per exchange.
    """

    def __init__(self, n: int, config: CascadeConfig, max_flips: Optional[int] = None):
        self.n = int(n)
        self.config = config
        self.max_flips = 2 * self.n + 16 if max_flips is None else max_flips
        self.blocks: List[List[np.ndarray]] = []
        self.block_of: List[np.ndarray] = []
        self.mismatch: List[np.ndarray] = []
        self.flips: List[int] = []
        self._batch: List[np.ndarray] = []
        self._state = "seed"
        if self.n == 0:
            self._state = "done"
        else:
            self.start_pass(None)

    @property
    def pass_index(self) -> int:
        return len(self.blocks) - 1

    @property
    def done(self) -> bool:
        return self._state == "done"

    def next_request(self):
        if self._state == "seed":
            return "seed", len(self.blocks)
        if self._state == "top":
            return "query", self.blocks[-1]
        if self._state == "search":
            return "query", [cand[: len(cand) // 2] for cand in self._batch]
        return "done", None

    def start_pass(self, seed: Optional[int]) -> None:
        if self._state != "seed":
            raise CascadeError("no pass is waiting for a seed")
        j = len(self.blocks)
        order = np.arange(self.n) if j == 0 else pass_permutation(int(seed), self.n)
        size = self.config.block_size(j, self.n)
        blocks = [order[i : i + size] for i in range(0, self.n, size)]
        block_of = np.empty(self.n, dtype=np.int64)
        for b, idx in enumerate(blocks):
            block_of[idx] = b
        self.blocks.append(blocks)
        self.block_of.append(block_of)
        self.mismatch.append(np.zeros(len(blocks), dtype=bool))
        self._state = "top"

    def absorb(self, b_parities, a_parities) -> List[int]:
        kind, sets = self.next_request()
        if kind != "query":
            raise CascadeError("no parity query is outstanding")
        b_parities = np.asarray(b_parities, dtype=np.uint8)
        a_parities = np.asarray(a_parities, dtype=np.uint8)
        if len(b_parities) != len(sets) or len(a_parities) != len(sets):
            raise CascadeError(f"expected {len(sets)} parities per side")
        differs = b_parities != a_parities
        flipped: List[int] = []
        if self._state == "top":
            self.mismatch[-1][:] = differs
            self._schedule(flipped)
        else:
            narrowed = []
            for cand, d in zip(self._batch, differs):
                half = len(cand) // 2
                narrowed.append(cand[:half] if d else cand[half:])
            self._batch = narrowed
            self._resolve(flipped)
        return flipped

    def _flip(self, pos: int, flipped: List[int]) -> None:
        if len(self.flips) >= self.max_flips:
            raise CascadeError("flip budget exhausted; parity answers are inconsistent")
        self.flips.append(pos)
        flipped.append(pos)
        for j in range(len(self.blocks)):
            self.mismatch[j][self.block_of[j][pos]] ^= True

    def _resolve(self, flipped: List[int]) -> None:
        remaining = []
        for cand in self._batch:
            if len(cand) == 1:
                self._flip(int(cand[0]), flipped)
            else:
                remaining.append(cand)
        self._batch = remaining
        if not self._batch:
            self._schedule(flipped)

    def _schedule(self, flipped: List[int]) -> None:
        for j, mism in enumerate(self.mismatch):
            bad = np.flatnonzero(mism)
            if len(bad):
                self._batch = [self.blocks[j][b] for b in bad]
                self._state = "search"
                self._resolve(flipped)
                return
        self._batch = []
        self._state = "seed" if len(self.blocks) < self.config.passes else "done"


@dataclass
class ReconciliationResult:
    """Outcome of :func:`run_cascade`.

    ``parity_msgs`` are A's parity announcements, one array per exchange;
    ``bits_leaked`` counts their bits.
    """

    corrected_b: np.ndarray
    parity_msgs: List[np.ndarray] = field(default_factory=list)
    bits_leaked: int = 0
    flips: List[int] = field(default_factory=list)
    exchanges: int = 0


def run_cascade(a_bits, b_bits, config: CascadeConfig, transcript: Optional[list] = None) -> ReconciliationResult:
    """Reconcile ``b_bits`` toward ``a_bits``.

    Every public message is appended to ``transcript`` (when given) as a
    ``(sender, label, bits)`` tuple: pass seeds and B's parities come from
    B, parity answers from A.
    """
    a_bits = as_bits(a_bits)
    b = as_bits(b_bits).copy()
    if len(a_bits) != len(b):
        raise ValueError(f"length mismatch: {len(a_bits)} != {len(b)}")
    session = CascadeSession(len(b), config)
    result = ReconciliationResult(corrected_b=b)
    sink = transcript if transcript is not None else []

    while True:
        kind, arg = session.next_request()
        if kind == "done":
            break
        if kind == "seed":
            seed = config.seed_for(arg)
            sink.append(("B", "seed", from_int(seed, SEED_BITS)))
            session.start_pass(seed)
            continue
        b_par, a_par = parities(b, arg), parities(a_bits, arg)
        sink.append(("B", "query", b_par))
        sink.append(("A", "reply", a_par))
        result.parity_msgs.append(a_par)
        result.bits_leaked += len(a_par)
        result.exchanges += 1
        for pos in session.absorb(b_par, a_par):
            b[pos] ^= 1
    result.flips = list(session.flips)
    return result
