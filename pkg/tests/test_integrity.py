import itertools

import numpy as np
import pytest

from shielded_ka.amplify import HashId, TranscriptDigest, digest_transcript, select_hash
from shielded_ka.bits import as_bits, random_bits, to_str
from shielded_ka.channel import OokFrame, transmit_ook
from shielded_ka.codes import BergerCode, ManchesterCode
from shielded_ka.integrity import (
    ShieldedChannelParams,
    confirmation_frame,
    integrity_frame,
    shielded_receive,
    shielded_send,
    verify_confirmation,
    verify_transcript,
)


def params(n, t1, code=ManchesterCode, seed=0, hash_len=None):
    hid = select_hash(np.random.default_rng(seed), hash_len or n, t1)
    return ShieldedChannelParams(n, hid, code(t1))


def test_zero_payload_frame():
    p = params(4, 4, seed=3)
    frame = shielded_send("0000", p)
    # h(0) = 0 and the Manchester code maps 0 to 01
    assert to_str(frame.payload) == "0000" + "01" * 4
    verdict = shielded_receive(frame, p)
    assert verdict and to_str(verdict.payload) == "0000"


@pytest.mark.parametrize("code", [ManchesterCode, BergerCode])
def test_round_trip_and_frame_length(code, rng):
    p = params(64, 16, code)
    for _ in range(200):
        s = random_bits(64, rng)
        frame = shielded_send(s, p)
        assert len(frame.payload) == p.frame_length == 64 + p.t2
        verdict = shielded_receive(transmit_ook(frame), p)
        assert verdict.accepted and np.array_equal(verdict.payload, s)


def test_honest_runs_always_accepted(rng):
    p = params(48, 16, BergerCode, hash_len=64)
    assert all(shielded_receive(shielded_send(random_bits(48, rng), p), p) for _ in range(10_000))


@pytest.mark.parametrize("t1", range(1, 9))
def test_tail_tampering_always_detected(t1):
    # every payload, every nonempty set of 0->1 flips inside the tag
    p = params(t1, t1, seed=t1)
    for s in itertools.product((0, 1), repeat=t1):
        frame = shielded_send(np.array(s, dtype=np.uint8), p).payload
        zero_tail = np.flatnonzero(frame[t1:] == 0) + t1
        for r in range(1, len(zero_tail) + 1):
            for chosen in itertools.combinations(zero_tail, r):
                mask = np.zeros(len(frame), dtype=np.uint8)
                mask[list(chosen)] = 1
                assert not shielded_receive(transmit_ook(OokFrame(frame), mask), p)


def test_payload_tampering_undetected_rate(rng):
    t1, n, trials = 8, 24, 40_000
    code = ManchesterCode(t1)
    undetected = 0
    for _ in range(trials):
        p = ShieldedChannelParams(n, select_hash(rng, n, t1), code)
        s = random_bits(n, rng)
        frame = shielded_send(s, p).payload
        mask = np.zeros(len(frame), dtype=np.uint8)
        zero_pos = np.flatnonzero(frame[:n] == 0)
        if not len(zero_pos):
            continue  # an all-ones payload has no OOK alteration (prob 2**-24)
        mask[rng.choice(zero_pos)] = 1
        undetected += bool(shielded_receive(transmit_ook(OokFrame(frame), mask), p))
    expected = 2.0**-t1
    assert abs(undetected / trials - expected) <= 5 * np.sqrt(expected * (1 - expected) / trials)


def test_wrong_length_frames_fail():
    p = params(8, 4)
    frame = shielded_send("10101010", p).payload
    assert not shielded_receive(frame[:-1], p)
    assert not shielded_receive(np.append(frame, 0), p)
    with pytest.raises(ValueError):
        shielded_send("101", p)


def test_params_validation(rng):
    hid = select_hash(rng, 16, 8)
    with pytest.raises(ValueError):
        ShieldedChannelParams(16, hid, ManchesterCode(4))
    with pytest.raises(ValueError):
        ShieldedChannelParams(4, hid, ManchesterCode(8))
    with pytest.raises(ValueError):
        ShieldedChannelParams(20, hid, ManchesterCode(8))


@pytest.fixture
def digest(rng):
    hid = select_hash(rng, 96, 32)
    return digest_transcript(hid, [random_bits(50, rng), random_bits(7, rng)])


def test_verify_transcript_cases(digest):
    code = BergerCode(32)
    frame = integrity_frame(digest, code)
    assert verify_transcript(digest, frame, code)
    other = TranscriptDigest(digest.state ^ 1, 32, digest.messages_absorbed)
    assert not verify_transcript(other, frame, code)
    tampered = frame.copy()
    tampered[np.flatnonzero(frame == 0)[0]] = 1
    assert not verify_transcript(digest, tampered, code)
    assert not verify_transcript(digest, frame[:-1], code)


def test_key_confirmation(digest, rng):
    code = BergerCode(32)
    key = random_bits(32, rng)
    fa = confirmation_frame(key, digest, code, "A")
    assert verify_confirmation(fa, key, digest, code, "A")
    assert not verify_confirmation(fa, key, digest, code, "B")
    wrong = key.copy()
    wrong[0] ^= 1
    assert not verify_confirmation(fa, wrong, digest, code, "A")
    assert not np.array_equal(fa, confirmation_frame(key, digest, code, "B"))
