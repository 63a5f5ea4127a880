"""Two-party key agreement with integrity verification.

Order of events:

1. A (the tag) picks a hash id locally.
2. B (the sensor) streams ``n0`` random bits to A over the noisy channel.
3. Both run bit-pair distillation, Cascade and privacy amplification over
   the public channel.  Every public message is absorbed into A's rolling
   digest; B stores the full transcript.
4. A announces the hash id over OOK.
5. B sends the coded digest of its transcript over OOK; A compares it with
   its own.  On success both exchange key-confirmation frames.

The parties are sans-IO state machines: :meth:`Party.handle` consumes one
delivered message and returns the messages to send.  Channels, the
adversary and message routing live in :func:`run_protocol`.  Frames carry
no headers; a receiver interprets each one from its own state and checks
only the expected length.  The ``label`` on a :class:`Message` is tracing
metadata and is never consulted by a receiver.
"""

from __future__ import annotations

import copy
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Tuple

import numpy as np

from .adversary import EveView, Jammer, OokTamper, Passive, PublicMessage, eavesdrop, eve_key_guess, tamper
from .amplify import HashId, TranscriptDigest, amplify, digest_transcript, select_hash, transcript_absorb
from .bits import as_bits, from_int, random_bits, to_int, to_str, zeros
from .cascade import SEED_BITS, CascadeError, CascadeSession, parities
from .channel import BinarySymmetricChannel
from .config import ConfigError, ProtocolConfig
from .distill import keep_first_bits, kept_pair_indices, pair_parities
from .integrity import confirmation_frame, integrity_frame, verify_confirmation, verify_transcript

RAW = "cp"
PUBLIC = "c0"
CONTROL = "ctl"


class Phase(IntEnum):
    CHOOSE_HASH = 0
    RAW_EXCHANGE = 1
    DISTILL = 2
    RECONCILE = 3
    AMPLIFY = 4
    ANNOUNCE_HASH = 5
    INTEGRITY_VERIFY = 6
    DONE = 7
    ABORT = 8


@dataclass(frozen=True, eq=False)
class Message:
    channel: str
    label: str
    bits: np.ndarray

    @property
    def is_failure(self) -> bool:
        return self.channel == CONTROL

    def with_bits(self, bits) -> "Message":
        return Message(self.channel, self.label, as_bits(bits))


# The fixed failure message.  It is a distinct control frame, not integrity
# protected; forging it can only force an abort.
FAILURE = Message(CONTROL, "failure", zeros(0))

DETECTION_REASONS = frozenset(
    {"malformed frame", "cascade inconsistency", "integrity check failed", "key confirmation failed"}
)


class ProtocolViolation(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class Party:
    """Shared machinery of both roles."""

    role = "?"

    def __init__(self, config: ProtocolConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.code = config.make_code()
        self.phase = Phase.CHOOSE_HASH
        self.history: List[Phase] = [self.phase]
        self.reason: Optional[str] = None
        self.bits = zeros(0)
        self.key: Optional[np.ndarray] = None
        self.confirmed = False
        self.bits_leaked = 0
        self.distilled_length: Optional[int] = None
        self.distilled: Optional[np.ndarray] = None
        self.round = 0
        self.session: Optional[CascadeSession] = None
        self.log: List[np.ndarray] = []

    @property
    def finished(self) -> bool:
        return self.phase is Phase.DONE and self.confirmed

    def _enter(self, phase: Phase) -> None:
        if phase < self.phase:
            raise RuntimeError(f"phase regression {self.phase.name} -> {phase.name}")
        self.phase = phase
        self.history.append(phase)

    def _abort(self, reason: str) -> None:
        if self.phase is not Phase.ABORT:
            self.reason = reason
            self.phase = Phase.ABORT
            self.history.append(Phase.ABORT)

    def _public(self, label: str, bits) -> Message:
        bits = as_bits(bits)
        self._record(bits)
        return Message(PUBLIC, label, bits)

    def _record(self, bits: np.ndarray) -> None:
        self.log.append(bits.copy())

    @staticmethod
    def _expect(msg: Message, channel: str, length: int) -> np.ndarray:
        if msg.channel != channel or len(msg.bits) != length:
            raise ProtocolViolation("malformed frame")
        return msg.bits

    def start(self) -> List[Message]:
        return []

    def handle(self, msg: Message) -> List[Message]:
        if self.phase is Phase.ABORT:
            return []
        if msg.is_failure:
            self._abort("peer reported failure")
            return []
        try:
            return self._dispatch(msg)
        except ProtocolViolation as exc:
            self._abort(exc.reason)
        except CascadeError:
            self._abort("cascade inconsistency")
        return [FAILURE]

    def _dispatch(self, msg: Message) -> List[Message]:
        raise NotImplementedError

    def _finish_distill(self) -> None:
        self.distilled_length = len(self.bits)
        self.distilled = self.bits.copy()
        if len(self.bits) == 0:
            raise ProtocolViolation("insufficient key material")
        self._enter(Phase.RECONCILE)
        self.session = CascadeSession(len(self.bits), self.config.cascade_config(len(self.bits)))

    def _check_material(self) -> None:
        cfg = self.config
        n = len(self.bits)
        if n < cfg.t1 or n - self.bits_leaked - 2 * cfg.t1 < cfg.key_len:
            raise ProtocolViolation("insufficient key material")


class TagA(Party):
    """The low-cost device: keeps only a rolling transcript digest."""

    role = "A"

    def __init__(self, config: ProtocolConfig, rng: np.random.Generator):
        super().__init__(config, rng)
        self.hash_id: Optional[HashId] = None
        self.digest = TranscriptDigest.initial(config.t1)
        self._query: Optional[np.ndarray] = None

    def _record(self, bits):
        super()._record(bits)
        self.digest = transcript_absorb(self.digest, self.hash_id, bits)

    def start(self) -> List[Message]:
        self.hash_id = select_hash(self.rng, self.config.hash_input_length, self.config.t1)
        self._enter(Phase.RAW_EXCHANGE)
        return []

    def _dispatch(self, msg):
        phase = self.phase
        if phase is Phase.RAW_EXCHANGE:
            self.bits = self._expect(msg, RAW, self.config.n0).copy()
            self._enter(Phase.DISTILL)
            return []
        if phase is Phase.DISTILL:
            theirs = self._expect(msg, PUBLIC, len(self.bits) // 2)
            self._record(theirs)
            mine = pair_parities(self.bits)
            out = [self._public("distill", mine)]
            self.bits = keep_first_bits(self.bits, kept_pair_indices(mine, theirs))
            self.round += 1
            if self.round == self.config.distill_rounds:
                self._finish_distill()
            return out
        if phase is Phase.RECONCILE:
            return self._reconcile(msg)
        if phase is Phase.INTEGRITY_VERIFY:
            frame = self._expect(msg, PUBLIC, self.code.codeword_length)
            if not verify_transcript(self.digest, frame, self.code):
                raise ProtocolViolation("integrity check failed")
            self._enter(Phase.DONE)
            return [Message(PUBLIC, "confirm", confirmation_frame(self.key, self.digest, self.code, "A"))]
        if phase is Phase.DONE and not self.confirmed:
            frame = self._expect(msg, PUBLIC, self.code.codeword_length)
            if not verify_confirmation(frame, self.key, self.digest, self.code, "B"):
                raise ProtocolViolation("key confirmation failed")
            self.confirmed = True
            return []
        raise ProtocolViolation("malformed frame")

    def _reconcile(self, msg):
        kind, sets = self.session.next_request()
        if kind == "seed":
            seed = self._expect(msg, PUBLIC, SEED_BITS)
            self._record(seed)
            self.session.start_pass(to_int(seed))
            return []
        theirs = self._expect(msg, PUBLIC, len(sets))
        self._record(theirs)
        mine = parities(self.bits, sets)
        out = [self._public("reply", mine)]
        self.bits_leaked += len(mine)
        self.session.absorb(theirs, mine)
        if self.session.done:
            self._check_material()
            self._enter(Phase.AMPLIFY)
            self.key = amplify(self.bits, self.hash_id, self.config.key_len)
            self._enter(Phase.ANNOUNCE_HASH)
            out.append(self._public("hash_id", self.hash_id.to_bits()))
            self._enter(Phase.INTEGRITY_VERIFY)
        return out


class SensorB(Party):
    """The better-equipped device: stores the whole public transcript."""

    role = "B"

    def __init__(self, config: ProtocolConfig, rng: np.random.Generator):
        super().__init__(config, rng)
        self.raw = zeros(0)
        self.hash_id: Optional[HashId] = None
        self.digest: Optional[TranscriptDigest] = None
        self._parities: Optional[np.ndarray] = None
        self._query: Optional[np.ndarray] = None

    @property
    def transcript(self) -> List[np.ndarray]:
        return self.log

    def start(self) -> List[Message]:
        self._enter(Phase.RAW_EXCHANGE)
        self.raw = random_bits(self.config.n0, self.rng)
        self.bits = self.raw.copy()
        self._enter(Phase.DISTILL)
        self._parities = pair_parities(self.bits)
        return [Message(RAW, "raw", self.raw.copy()), self._public("distill", self._parities)]

    def _dispatch(self, msg):
        phase = self.phase
        if phase is Phase.DISTILL:
            theirs = self._expect(msg, PUBLIC, len(self._parities))
            self._record(theirs)
            self.bits = keep_first_bits(self.bits, kept_pair_indices(theirs, self._parities))
            self.round += 1
            if self.round < self.config.distill_rounds:
                self._parities = pair_parities(self.bits)
                return [self._public("distill", self._parities)]
            self._finish_distill()
            return self._drive_cascade()
        if phase is Phase.RECONCILE:
            reply = self._expect(msg, PUBLIC, len(self._query))
            self._record(reply)
            self.bits_leaked += len(reply)
            for pos in self.session.absorb(self._query, reply):
                self.bits[pos] ^= 1
            return self._drive_cascade()
        if phase is Phase.ANNOUNCE_HASH:
            seed = self._expect(msg, PUBLIC, self.config.hash_input_length + self.config.t1 - 1)
            self._record(seed)
            self.hash_id = HashId.from_bits(seed, self.config.hash_input_length, self.config.t1)
            self.digest = digest_transcript(self.hash_id, self.log)
            self.key = amplify(self.bits, self.hash_id, self.config.key_len)
            self._enter(Phase.INTEGRITY_VERIFY)
            return [Message(PUBLIC, "integrity", integrity_frame(self.digest, self.code))]
        if phase is Phase.INTEGRITY_VERIFY:
            frame = self._expect(msg, PUBLIC, self.code.codeword_length)
            if not verify_confirmation(frame, self.key, self.digest, self.code, "A"):
                raise ProtocolViolation("key confirmation failed")
            self._enter(Phase.DONE)
            self.confirmed = True
            return [Message(PUBLIC, "confirm", confirmation_frame(self.key, self.digest, self.code, "B"))]
        raise ProtocolViolation("malformed frame")

    def _drive_cascade(self) -> List[Message]:
        out = []
        while True:
            kind, sets = self.session.next_request()
            if kind == "seed":
                seed = int(self.rng.integers(0, 2**64, dtype=np.uint64))
                out.append(self._public("seed", from_int(seed, SEED_BITS)))
                self.session.start_pass(seed)
                continue
            if kind == "query":
                self._query = parities(self.bits, sets)
                out.append(self._public("query", self._query))
                return out
            self._check_material()
            self._enter(Phase.AMPLIFY)
            self._enter(Phase.ANNOUNCE_HASH)
            return out


def step(state: Party, incoming: Message) -> Tuple[Party, List[Message]]:
    """Pure transition: returns a new party state and the messages it emits."""
    new = copy.deepcopy(state)
    return new, new.handle(incoming)


SUCCESS = "success"
ABORT = "abort"
UNDETECTED = "undetected_mismatch"


@dataclass
class ProtocolOutcome:
    """Verdict and measurements of one run.

    Keys are bit strings (``None`` when a side never derived one).  Rates
    that could not be measured are ``None``.
    """

    verdict: str
    key_a: Optional[str] = None
    key_b: Optional[str] = None
    reason: Optional[str] = None
    detected: bool = False
    tampered: bool = False
    transcript_match: Optional[bool] = None
    bits_leaked: int = 0
    n_k: int = 0
    raw_error: Optional[float] = None
    p_ab_effective: Optional[float] = None
    distilled_error: Optional[float] = None
    residual_error: Optional[float] = None
    eve_agreement: Optional[float] = None
    messages: int = 0

    @property
    def key_match(self) -> bool:
        return self.key_a is not None and self.key_a == self.key_b


def _streams(seed) -> List[np.random.Generator]:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = [np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (k,)) for k in range(6)]
    return [np.random.default_rng(c) for c in children]


def run_protocol(
    config: ProtocolConfig,
    adversary=None,
    seed=None,
    max_messages: int = 200_000,
    keep: Optional[dict] = None,
) -> ProtocolOutcome:
    """Run one complete agreement between a fresh A and B.

    ``seed`` (an int or ``SeedSequence``; default ``config.master_seed``)
    determines every random choice.  When ``keep`` is a dict the final
    parties, Eve's view and the public log are stored in it for inspection.
    """
    strategy = config.strategy() if adversary is None else adversary
    if config.n0 == 0:
        return ProtocolOutcome(ABORT, reason="empty input")
    rng_a, rng_b, rng_ab, rng_ae, rng_adv, rng_jam = _streams(config.master_seed if seed is None else seed)
    a, b = TagA(config, rng_a), SensorB(config, rng_b)
    link = BinarySymmetricChannel(config.p_ab, rng_ab)
    jam = BinarySymmetricChannel(strategy.q, rng_jam) if isinstance(strategy, Jammer) else None
    view = EveView(observed_cp=zeros(0))
    peer = {"A": b, "B": a}
    queue = deque()
    for party in (a, b):
        queue.extend((peer[party.role], m, party.role) for m in party.start())

    first_reason = None
    tampered = False
    delivered_count = 0
    raw_received = None
    while queue:
        if delivered_count >= max_messages:
            first_reason = first_reason or "message budget exhausted"
            break
        dest, msg, sender = queue.popleft()
        delivered_count += 1
        if msg.channel == RAW:
            view.observed_cp = eavesdrop(msg.bits, config.p_ae, rng_ae)
            received = link.transmit(msg.bits)
            if jam is not None:
                received = jam.transmit(received)
            raw_received = received
            msg = msg.with_bits(received)
        elif msg.channel == PUBLIC:
            view.observed_c0.append(PublicMessage(sender, msg.label, msg.bits.copy()))
            if isinstance(strategy, OokTamper) and strategy.targets(msg.label):
                altered = tamper(strategy, msg.bits, rng_adv)
                if not np.array_equal(altered, msg.bits):
                    tampered = True
                    msg = msg.with_bits(altered)
        was_aborted = dest.phase is Phase.ABORT
        out = dest.handle(msg)
        if not was_aborted and dest.phase is Phase.ABORT and first_reason is None:
            first_reason = dest.reason
        queue.extend((peer[dest.role], m, dest.role) for m in out)

    if a.finished and b.finished:
        verdict = SUCCESS if np.array_equal(a.key, b.key) else UNDETECTED
        reason = None
    else:
        verdict = ABORT
        reason = first_reason or "stalled"
    outcome = ProtocolOutcome(
        verdict,
        key_a=None if a.key is None else to_str(a.key),
        key_b=None if b.key is None else to_str(b.key),
        reason=reason,
        detected=verdict == ABORT and reason in DETECTION_REASONS,
        tampered=tampered,
        bits_leaked=a.bits_leaked,
        n_k=a.distilled_length or 0,
        messages=delivered_count,
    )
    if len(a.log) == len(b.log):
        outcome.transcript_match = all(np.array_equal(x, y) for x, y in zip(a.log, b.log))
    else:
        outcome.transcript_match = False
    if raw_received is not None:
        outcome.raw_error = float(np.mean(raw_received != b.raw)) if len(b.raw) else None
        outcome.p_ab_effective = outcome.raw_error
    if a.distilled is not None and b.distilled is not None and len(a.distilled) == len(b.distilled):
        outcome.distilled_error = float(np.mean(a.distilled != b.distilled)) if len(a.distilled) else None
        if len(a.bits) == len(b.bits) and len(a.bits):
            outcome.residual_error = float(np.mean(a.bits != b.bits))
    if a.key is not None:
        guess = eve_key_guess(
            view,
            rounds=config.distill_rounds,
            cascade_passes=config.cascade_passes,
            block_size=config.block_size,
            key_length=config.key_len,
            hash_input_length=config.hash_input_length,
            hash_output_length=config.t1,
        )
        if guess is not None:
            outcome.eve_agreement = float(np.mean(guess == a.key))
    if keep is not None:
        keep.update(a=a, b=b, eve=view)
    return outcome
