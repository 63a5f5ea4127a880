import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shielded_ka.adversary import (
    FlipAllZeros,
    FlipEachZero,
    FlipKRandomZeros,
    Jammer,
    OokTamper,
    Passive,
    TargetedRegion,
    eavesdrop,
    parse_adversary,
    tamper,
    tamper_streaming,
)
from shielded_ka.bits import as_bits, to_str
from shielded_ka.config import ProtocolConfig
from shielded_ka.protocol import SUCCESS, run_protocol

POLICIES = [FlipEachZero(0.3), FlipKRandomZeros(3), FlipAllZeros(), TargetedRegion(2, 9, 0.7)]


@pytest.mark.parametrize("policy", POLICIES, ids=repr)
@pytest.mark.parametrize("streaming", [False, True])
@settings(max_examples=60)
@given(frame=st.lists(st.integers(0, 1), max_size=40), seed=st.integers(0, 2**32))
def test_only_zero_to_one(policy, streaming, frame, seed):
    frame = as_bits(frame)
    out = tamper(OokTamper(policy, streaming), frame, np.random.default_rng(seed))
    assert len(out) == len(frame)
    assert np.array_equal(out | frame, out)  # every 1 survives
    assert np.array_equal(out, frame | (out ^ frame))


def test_q_zero_is_identity(rng):
    frame = rng.integers(0, 2, 200, dtype=np.uint8)
    for streaming in (False, True):
        assert np.array_equal(tamper(OokTamper(FlipEachZero(0.0), streaming), frame, rng), frame)


def test_flip_all_zeros():
    assert to_str(tamper(parse_adversary("tamper:all"), "0101", None)) == "1111"


def test_k_one_on_zero_frame(rng):
    for streaming in (False, True):
        for _ in range(50):
            out = tamper(OokTamper(FlipKRandomZeros(1), streaming), "00000000", rng)
            assert out.sum() == 1


def test_k_random_zeros_whole_frame_exact(rng):
    frame = as_bits("1100100000")
    out = FlipKRandomZeros(4).mask(frame, rng)
    assert out.sum() == 4 and not (out & frame).any()
    assert FlipKRandomZeros(20).mask(frame, rng).sum() == 7


def test_streaming_k_subset_is_uniform(rng):
    # selection sampling over 6 positions with k = 2: each position w.p. 1/3
    hits = np.zeros(6)
    for _ in range(6000):
        hits += tamper_streaming(FlipKRandomZeros(2), "000000", rng)
    assert np.all(np.abs(hits / 6000 - 1 / 3) < 5 * np.sqrt((1 / 3) * (2 / 3) / 6000))


def test_streaming_decisions_ignore_future_bits():
    # identical prefixes and rng state give identical masks on the prefix
    f1, f2 = as_bits("0010110000"), as_bits("0010111111")
    policy = FlipEachZero(0.5)
    m1 = tamper_streaming(policy, f1, np.random.default_rng(9)) ^ f1
    m2 = tamper_streaming(policy, f2, np.random.default_rng(9)) ^ f2
    assert np.array_equal(m1[:6], m2[:6])


def test_targeted_region_stays_inside(rng):
    out = tamper(parse_adversary("tamper:start=3,stop=6"), np.zeros(10, dtype=np.uint8), rng)
    assert to_str(out) == "0001110000"


@pytest.mark.parametrize("strategy", [Passive(), Jammer(0.1)])
def test_non_tamper_strategies_raise(strategy):
    with pytest.raises(TypeError):
        tamper(strategy, "0000", np.random.default_rng(0))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("passive", Passive()),
        ("none", Passive()),
        ("jam:q=0.05", Jammer(0.05)),
        ("tamper:all", None),
        ("tamper:q=0.25,mode=stream", None),
        ("tamper:k=3,only=hash_id", None),
        ("tamper:start=0,stop=4,q=0.5", None),
    ],
)
def test_parse_adversary(text, expected):
    strategy = parse_adversary(text)
    if expected is not None:
        assert strategy == expected
    assert parse_adversary(str(strategy)) == strategy


def test_parse_details():
    s = parse_adversary("tamper:k=3,only=hash_id")
    assert isinstance(s.policy, FlipKRandomZeros) and s.policy.k == 3
    assert s.targets("hash_id") and not s.targets("reply")
    assert parse_adversary("tamper:q=0.25,mode=stream").streaming
    assert parse_adversary(None) == Passive()


@pytest.mark.parametrize("bad", ["tamper:", "smash", "jam:q=0.7", "tamper:q=2", "tamper:k=-1"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_adversary(bad)


def test_eavesdrop(rng):
    msg = rng.integers(0, 2, 1_000_000, dtype=np.uint8)
    assert np.array_equal(eavesdrop(msg, 0.0, rng), msg)
    rate = np.mean(eavesdrop(msg, 0.25, rng) != msg)
    assert abs(rate - 0.25) <= 5 * np.sqrt(0.25 * 0.75 / len(msg))
    assert len(eavesdrop(as_bits(""), 0.2, rng)) == 0


def test_noiseless_eve_recovers_the_key():
    outcome = run_protocol(ProtocolConfig(n0=2048, p_ae=0.0), seed=4)
    assert outcome.verdict == SUCCESS
    assert outcome.eve_agreement == 1.0


def test_very_noisy_eve_learns_nothing():
    cfg = ProtocolConfig(n0=2048, p_ae=0.49)
    agree = [run_protocol(cfg, seed=s).eve_agreement for s in range(60)]
    bits = 60 * cfg.key_len
    assert abs(np.mean(agree) - 0.5) <= 5 * np.sqrt(0.25 / bits)


def test_jammer_only_touches_the_raw_stream():
    keep = {}
    outcome = run_protocol(ProtocolConfig(n0=2048, adversary="jam:q=0.05"), seed=1, keep=keep)
    assert outcome.verdict == SUCCESS
    assert not outcome.tampered and outcome.transcript_match
    # public messages reach the peer exactly as sent
    assert all(np.array_equal(x, y) for x, y in zip(keep["a"].log, keep["b"].log))
    assert outcome.raw_error > 0.1
