"""Noisy and on-off-keyed bit channels.

Two channels are modelled:

* a binary symmetric channel (BSC) flipping each bit independently; it
  carries the raw bit stream between the parties and to the eavesdropper;
* an on-off-keying (OOK) channel that is noiseless on its own and lets an
  adversary add signal energy but never remove it.  Tampering is therefore
  the pointwise OR of the frame with an adversary mask.

Randomness comes from numpy's PCG64 generator (``np.random.default_rng``);
one independent uniform draw is consumed per transmitted bit, so a fixed
seed reproduces a transmission bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .bits import as_bits


@dataclass(frozen=True)
class BscParams:
    """Crossover probability and seed of a binary symmetric channel."""

    p: float
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p < 0.5:
            raise ValueError(f"BSC error probability must lie in [0, 0.5), got {self.p}")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")


class BinarySymmetricChannel:
    """A BSC with its own PCG64 stream.

    Successive calls to :meth:`transmit` continue the same stream, so one
    instance models one physical link for the duration of a run.
    """

    def __init__(self, p: float, rng: Union[int, np.random.Generator, None] = None):
        BscParams(p)  # validation only
        self.p = float(p)
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    def transmit(self, msg) -> np.ndarray:
        msg = as_bits(msg)
        flips = self.rng.random(len(msg)) < self.p
        return msg ^ flips.astype(np.uint8)


def transmit_bsc(msg, params: BscParams) -> np.ndarray:
    """Send ``msg`` through a fresh BSC seeded from ``params.rng_seed``."""
    return BinarySymmetricChannel(params.p, params.rng_seed).transmit(msg)


def compose_bsc(p: float, q: float) -> float:
    """Crossover probability of two BSCs in series."""
    return p * (1.0 - q) + q * (1.0 - p)


@dataclass(frozen=True, eq=False)
class OokFrame:
    """On-air frame: 1 means signal present for one period, 0 means silence."""

    payload: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "payload", as_bits(self.payload))

    def __len__(self):
        return len(self.payload)


def transmit_ook(frame: Union[OokFrame, np.ndarray, str], tamper_mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Deliver an OOK frame, OR-ing in whatever energy the adversary adds.

    The result always satisfies ``supp(payload) <= supp(result)``: a 1 can
    never be turned into a 0.
    """
    payload = frame.payload if isinstance(frame, OokFrame) else as_bits(frame)
    if tamper_mask is None:
        return payload.copy()
    mask = as_bits(tamper_mask)
    if len(mask) != len(payload):
        raise ValueError(f"tamper mask length {len(mask)} does not match frame length {len(payload)}")
    return payload | mask
