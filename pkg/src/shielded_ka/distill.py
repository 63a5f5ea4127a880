"""Advantage distillation by bit-pair iteration.

Each party splits its string into consecutive disjoint pairs
``(0, 1), (2, 3), ...`` and publishes the parity of every pair.  Where the
two parities agree both parties keep the first bit of the pair; elsewhere
the pair is dropped.  A trailing unpaired bit is always dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .bits import as_bits


def pair_parities(bits) -> np.ndarray:
    bits = as_bits(bits)
    m = len(bits) // 2
    return bits[0 : 2 * m : 2] ^ bits[1 : 2 * m : 2]


def kept_pair_indices(parities_a: np.ndarray, parities_b: np.ndarray) -> np.ndarray:
    """Pair indices whose announced parities agree."""
    if len(parities_a) != len(parities_b):
        raise ValueError("parity strings differ in length")
    return np.flatnonzero(parities_a == parities_b)


def keep_first_bits(bits: np.ndarray, pair_indices: np.ndarray) -> np.ndarray:
    return as_bits(bits)[2 * np.asarray(pair_indices, dtype=np.int64)]


@dataclass
class DistillRound:
    """Result of one round, as seen jointly by both parties.

    ``kept_indices`` are positions in the round's input that survived (the
    first position of each agreeing pair).  ``public_msgs`` holds A's and
    then B's parity string; both travel over the public channel.
    """

    input_length: int
    a_kept: np.ndarray
    b_kept: np.ndarray
    kept_indices: np.ndarray
    public_msgs: List[np.ndarray] = field(default_factory=list)


def distill_round(a_bits, b_bits) -> DistillRound:
    a_bits, b_bits = as_bits(a_bits), as_bits(b_bits)
    if len(a_bits) != len(b_bits):
        raise ValueError(f"length mismatch: {len(a_bits)} != {len(b_bits)}")
    pa, pb = pair_parities(a_bits), pair_parities(b_bits)
    pairs = kept_pair_indices(pa, pb)
    return DistillRound(
        input_length=len(a_bits),
        a_kept=keep_first_bits(a_bits, pairs),
        b_kept=keep_first_bits(b_bits, pairs),
        kept_indices=2 * pairs,
        public_msgs=[pa, pb],
    )


@dataclass(frozen=True)
class DistillConfig:
    rounds: int = 2
    target_error: Optional[float] = None

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("at least one distillation round is required")


def distill(a_bits, b_bits, rounds: int = 2) -> List[DistillRound]:
    """Run ``rounds`` rounds, feeding each round's kept bits into the next."""
    history = []
    a, b = as_bits(a_bits), as_bits(b_bits)
    for _ in range(rounds):
        step = distill_round(a, b)
        history.append(step)
        a, b = step.a_kept, step.b_kept
    return history


def post_round_error_rate(p: float) -> float:
    """Disagreement rate of a kept bit after one round on i.i.d. errors.

    A pair survives when both bits are correct, probability ``(1-p)**2``,
    or both are flipped, ``p**2``; only the second case leaves a wrong bit.
    """
    if not 0.0 <= p < 0.5:
        raise ValueError(f"error rate must lie in [0, 0.5), got {p}")
    return p * p / (p * p + (1.0 - p) ** 2)


def survival_rate(p: float) -> float:
    """Fraction of pairs kept in one round."""
    return p * p + (1.0 - p) ** 2


def iterate_error_rate(p: float, rounds: int) -> float:
    for _ in range(rounds):
        p = post_round_error_rate(p)
    return p


def rounds_for_target(p: float, target: float, max_rounds: int = 64) -> int:
    """Smallest number of rounds bringing the predicted error to ``target``."""
    if target <= 0:
        raise ValueError("target error must be positive")
    k = 1
    p = post_round_error_rate(p)
    while p > target:
        if k >= max_rounds:
            raise ValueError(f"target {target} not reached within {max_rounds} rounds")
        p = post_round_error_rate(p)
        k += 1
    return k


def expected_length(n0: int, p: float, rounds: int) -> float:
    """Mean string length after ``rounds`` rounds starting from ``n0`` bits."""
    n = float(n0)
    for _ in range(rounds):
        n = math.floor(n) / 2 * survival_rate(p)
        p = post_round_error_rate(p)
    return n
