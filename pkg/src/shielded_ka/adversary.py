"""Adversary models.

Eve always listens: she receives the raw stream through her own BSC and
reads every public message noiselessly.  On top of that she may

* stay passive,
* tamper with public OOK frames, adding 1s according to a policy, or
* jam the raw-stream phase, raising the legitimate error rate without
  touching her own.

Tamper policies come in a whole-frame form (the mask may depend on the
entire frame, the stronger adversary and the default) and a streaming form
where the decision for bit ``i`` only sees bits ``0..i-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .amplify import HashId, amplify
from .bits import as_bits, to_int, zeros
from .cascade import CascadeConfig, CascadeSession
from .channel import BinarySymmetricChannel
from .distill import keep_first_bits, kept_pair_indices


@dataclass(frozen=True, repr=False)
class FlipEachZero:
    """Add energy to every silent period independently with probability ``q``."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must be a probability")

    def mask(self, frame: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return ((rng.random(len(frame)) < self.q) & (frame == 0)).astype(np.uint8)

    def decide(self, i, n, prefix, emitted, rng) -> int:
        return int(rng.random() < self.q)

    def __repr__(self):
        return f"tamper:q={self.q:g}"


@dataclass(frozen=True, repr=False)
class FlipKRandomZeros:
    """Turn exactly ``k`` zeros (or all of them, if fewer) into ones."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")

    def mask(self, frame, rng):
        zero_pos = np.flatnonzero(frame == 0)
        out = zeros(len(frame))
        if len(zero_pos):
            out[rng.choice(zero_pos, size=min(self.k, len(zero_pos)), replace=False)] = 1
        return out

    def decide(self, i, n, prefix, emitted, rng):
        # selection sampling: a uniform k-subset of positions, blind to the current bit
        remaining = self.k - emitted
        return int(remaining > 0 and rng.random() * (n - i) < remaining)

    def __repr__(self):
        return f"tamper:k={self.k}"


@dataclass(frozen=True, repr=False)
class FlipAllZeros:
    def mask(self, frame, rng):
        return (frame == 0).astype(np.uint8)

    def decide(self, i, n, prefix, emitted, rng):
        return 1

    def __repr__(self):
        return "tamper:all"


@dataclass(frozen=True, repr=False)
class TargetedRegion:
    """Like :class:`FlipEachZero`, restricted to positions ``[start, stop)``."""

    start: int
    stop: int
    q: float = 1.0

    def __post_init__(self):
        if self.start < 0 or self.stop < self.start:
            raise ValueError("invalid region")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must be a probability")

    def mask(self, frame, rng):
        out = zeros(len(frame))
        lo, hi = min(self.start, len(frame)), min(self.stop, len(frame))
        region = frame[lo:hi]
        out[lo:hi] = (rng.random(len(region)) < self.q) & (region == 0)
        return out

    def decide(self, i, n, prefix, emitted, rng):
        return int(self.start <= i < self.stop and rng.random() < self.q)

    def __repr__(self):
        return f"tamper:start={self.start},stop={self.stop},q={self.q:g}"


TamperPolicy = Union[FlipEachZero, FlipKRandomZeros, FlipAllZeros, TargetedRegion]


@dataclass(frozen=True)
class Passive:
    def __str__(self):
        return "passive"


@dataclass(frozen=True)
class OokTamper:
    """Tamper with public frames; ``only`` restricts it to one message kind."""

    policy: TamperPolicy
    streaming: bool = False
    only: Optional[str] = None

    def targets(self, label: str) -> bool:
        return self.only is None or self.only == label

    def __str__(self):
        text = repr(self.policy) + (",mode=stream" if self.streaming else "")
        return text + (f",only={self.only}" if self.only else "")


@dataclass(frozen=True)
class Jammer:
    """Extra BSC noise of rate ``q`` on the raw stream reaching A."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q < 0.5:
            raise ValueError("jamming noise must lie in [0, 0.5)")

    def __str__(self):
        return f"jam:q={self.q:g}"


AdversaryStrategy = Union[Passive, OokTamper, Jammer]


def parse_adversary(text: Union[str, AdversaryStrategy, None]) -> AdversaryStrategy:
    """Parse ``passive``, ``jam:q=..`` or ``tamper:<policy>[,mode=stream]``.

    Tamper policies: ``q=..`` (each zero), ``k=..`` (k random zeros),
    ``all``, ``start=..,stop=..[,q=..]`` (targeted region).  ``only=<label>``
    limits tampering to one message kind (``distill``, ``seed``, ``query``,
    ``reply``, ``hash_id``, ``integrity``, ``confirm``).
    """
    if text is None:
        return Passive()
    if not isinstance(text, str):
        return text
    kind, _, rest = text.strip().partition(":")
    opts = {}
    flags = set()
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if eq:
            opts[key.strip()] = value.strip()
        else:
            flags.add(key.strip())
    if kind in ("passive", "none"):
        return Passive()
    if kind == "jam":
        return Jammer(float(opts.get("q", 0.0)))
    if kind == "tamper":
        streaming = opts.pop("mode", "frame") == "stream"
        only = opts.pop("only", None)
        if "all" in flags:
            policy = FlipAllZeros()
        elif "start" in opts or "stop" in opts:
            policy = TargetedRegion(int(opts.get("start", 0)), int(opts["stop"]), float(opts.get("q", 1.0)))
        elif "k" in opts:
            policy = FlipKRandomZeros(int(opts["k"]))
        elif "q" in opts:
            policy = FlipEachZero(float(opts["q"]))
        else:
            raise ValueError(f"tamper adversary needs a policy: {text!r}")
        return OokTamper(policy, streaming, only)
    raise ValueError(f"unknown adversary {text!r}; expected passive, tamper:... or jam:q=...")


def eavesdrop(msg, p_ae: float, rng) -> np.ndarray:
    """Eve's copy of a raw-stream transmission."""
    return BinarySymmetricChannel(p_ae, rng).transmit(msg)


def tamper(strategy: AdversaryStrategy, frame, rng: np.random.Generator) -> np.ndarray:
    """Return ``frame OR mask``; only :class:`OokTamper` can touch OOK frames."""
    if not isinstance(strategy, OokTamper):
        raise TypeError(f"{strategy} cannot tamper with OOK frames")
    frame = as_bits(frame)
    if strategy.streaming:
        return tamper_streaming(strategy.policy, frame, rng)
    return frame | strategy.policy.mask(frame, rng)


def tamper_streaming(policy: TamperPolicy, frame, rng) -> np.ndarray:
    """Tamper on the fly: the choice for bit ``i`` sees only ``frame[:i]``."""
    frame = as_bits(frame)
    n = len(frame)
    mask = zeros(n)
    emitted = 0
    for i in range(n):
        if policy.decide(i, n, frame[:i], emitted, rng):
            mask[i] = 1
            emitted += 1
    return frame | mask


@dataclass(frozen=True)
class PublicMessage:
    """One public message as emitted by its sender."""

    sender: str
    label: str
    bits: np.ndarray = field(compare=False)


@dataclass
class EveView:
    observed_cp: np.ndarray
    observed_c0: List[PublicMessage] = field(default_factory=list)
    kept_positions: List[np.ndarray] = field(default_factory=list)


def eve_key_guess(
    view: EveView,
    public: Optional[Sequence[PublicMessage]] = None,
    *,
    rounds: int,
    cascade_passes: int,
    block_size,
    key_length: int,
    hash_input_length: int,
    hash_output_length: int,
) -> Optional[np.ndarray]:
    """Replay every public decision on Eve's noisy copy and hash the result.

    Eve keeps the same pairs as the parties, applies B's Cascade flips
    (their positions follow from the public parities) and amplifies with the
    announced hash id.  ``block_size`` maps the distilled length to Cascade's
    initial block size, as the parties compute it.  Returns ``None`` when
    the public record does not describe a completed run.
    """
    msgs = list(view.observed_c0 if public is None else public)
    bits = as_bits(view.observed_cp).copy()
    distill_msgs = [m for m in msgs if m.label == "distill"]
    view.kept_positions = []
    try:
        for r in range(rounds):
            by_sender = {m.sender: m.bits for m in distill_msgs[2 * r : 2 * r + 2]}
            pairs = kept_pair_indices(by_sender["A"], by_sender["B"])
            view.kept_positions.append(2 * pairs)
            bits = keep_first_bits(bits, pairs)
        session = CascadeSession(len(bits), CascadeConfig(cascade_passes, block_size(len(bits))))
        query = None
        hash_bits = None
        for m in msgs:
            if m.label == "seed":
                session.start_pass(to_int(m.bits))
            elif m.label == "query":
                query = m.bits
            elif m.label == "reply":
                for pos in session.absorb(query, m.bits):
                    bits[pos] ^= 1
            elif m.label == "hash_id":
                hash_bits = m.bits
        if hash_bits is None:
            return None
        hid = HashId.from_bits(hash_bits, hash_input_length, hash_output_length)
        return amplify(bits, hid, key_length)
    except (KeyError, ValueError, IndexError, RuntimeError):
        return None
