"""The shielded channel: payload plus unidirectionally coded hash over OOK.

A frame is laid out bit-exactly as ``[s: n bits][code.encode(h(s)): t2 bits]``
with no length prefix.  Because on-off keying only admits 0->1 changes and
the code has non-inclusive supports, tampering with the tail alone is
always caught; tampering with ``s`` survives only if ``h(s') == h(s)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .amplify import HashId, TranscriptDigest, apply_hash
from .bits import as_bits, from_int, random_bits, to_int
from .channel import OokFrame
from .codes import CodewordRejected, UnidirectionalCode

CONFIRM_TAG_BITS = 8
CONFIRM_TAGS = {"A": 0x5A, "B": 0xA5}


@dataclass(frozen=True, eq=False)
class VerificationVerdict:
    accepted: bool
    payload: Optional[np.ndarray] = None

    def __bool__(self):
        return self.accepted

    def __repr__(self):
        if self.accepted:
            return f"Accepted({''.join(map(str, self.payload))})"
        return "Failed"


FAILED = VerificationVerdict(False)


def accepted(payload) -> VerificationVerdict:
    return VerificationVerdict(True, as_bits(payload))


@dataclass(frozen=True)
class ShieldedChannelParams:
    n: int
    hash_id: HashId
    code: UnidirectionalCode

    def __post_init__(self):
        if self.code.source_length != self.t1:
            raise ValueError(f"code must encode {self.t1}-bit hashes, not {self.code.source_length}-bit words")
        if self.n < self.t1:
            raise ValueError(f"payload length {self.n} is shorter than the hash length {self.t1}")
        if self.n > self.hash_id.input_length:
            raise ValueError("payload longer than the hash input")
        if self.t2 < self.t1:
            raise ValueError("codeword shorter than the hash it encodes")

    @property
    def t1(self) -> int:
        return self.hash_id.output_length

    @property
    def t2(self) -> int:
        return self.code.codeword_length

    @property
    def frame_length(self) -> int:
        return self.n + self.t2


def shielded_send(s, params: ShieldedChannelParams) -> OokFrame:
    s = as_bits(s)
    if len(s) != params.n:
        raise ValueError(f"payload must have {params.n} bits, got {len(s)}")
    tag = params.code.encode(apply_hash(params.hash_id, s))
    return OokFrame(np.concatenate([s, tag]))


def shielded_receive(frame, params: ShieldedChannelParams) -> VerificationVerdict:
    frame = as_bits(frame.payload if isinstance(frame, OokFrame) else frame)
    if len(frame) != params.frame_length:
        return FAILED
    s1, s2 = frame[: params.n], frame[params.n :]
    expected = params.code.encode(apply_hash(params.hash_id, s1))
    return accepted(s1) if np.array_equal(s2, expected) else FAILED


def integrity_frame(digest: TranscriptDigest, code: UnidirectionalCode) -> np.ndarray:
    """The coded transcript digest sent at the integrity-verification step."""
    return code.encode(digest.bits)


def verify_transcript(own: TranscriptDigest, received_frame, code: UnidirectionalCode) -> VerificationVerdict:
    """Accept iff the received frame is exactly the codeword of our own digest."""
    received = as_bits(received_frame)
    if not np.array_equal(received, integrity_frame(own, code)):
        return FAILED
    try:
        return accepted(code.verify(received))
    except CodewordRejected:
        return FAILED


def confirmation_hash_id(digest: TranscriptDigest, key_length: int) -> HashId:
    """Second hash, seeded deterministically from the agreed transcript digest."""
    rng = np.random.default_rng(digest.state)
    n = key_length + CONFIRM_TAG_BITS
    return HashId(to_int(random_bits(n + digest.length - 1, rng)), n, digest.length)


def confirmation_frame(key, digest: TranscriptDigest, code: UnidirectionalCode, role: str) -> np.ndarray:
    """``code.encode(h'(K || tag))`` for the final key-confirmation exchange."""
    key = as_bits(key)
    hid = confirmation_hash_id(digest, len(key))
    tagged = np.concatenate([key, from_int(CONFIRM_TAGS[role], CONFIRM_TAG_BITS)])
    return code.encode(apply_hash(hid, tagged))


def verify_confirmation(received, key, digest: TranscriptDigest, code: UnidirectionalCode, role: str) -> bool:
    """Check the peer's (``role``) confirmation frame against our own key."""
    return np.array_equal(as_bits(received), confirmation_frame(key, digest, code, role))
