from collections import deque
from dataclasses import asdict

import numpy as np
import pytest

from shielded_ka.config import ProtocolConfig
from shielded_ka.protocol import (
    ABORT,
    FAILURE,
    RAW,
    SUCCESS,
    UNDETECTED,
    Message,
    Phase,
    SensorB,
    TagA,
    run_protocol,
    step,
)

CFG = ProtocolConfig(n0=2048)


def drive(config, seed=0):
    """Noiseless FIFO run that snapshots every delivery as (receiver, msg)."""
    rng = np.random.default_rng(seed)
    a, b = TagA(config, rng), SensorB(config, np.random.default_rng(seed + 1))
    peer = {"A": b, "B": a}
    queue = deque((peer[p.role], m) for p in (a, b) for m in p.start())
    deliveries = []
    while queue:
        dest, msg = queue.popleft()
        deliveries.append((step(dest, msg)[0].phase, dest.phase, dest.role, msg))
        queue.extend((peer[dest.role], m) for m in dest.handle(msg))
    return a, b, deliveries


def test_honest_success_rate():
    outcomes = [run_protocol(CFG, seed=s) for s in range(100)]
    assert sum(o.verdict == SUCCESS for o in outcomes) >= 99
    assert all(o.key_match for o in outcomes if o.verdict == SUCCESS)


def test_transcript_symmetry():
    keep = {}
    outcome = run_protocol(CFG, seed=3, keep=keep)
    assert outcome.verdict == SUCCESS and outcome.transcript_match
    a, b = keep["a"], keep["b"]
    assert len(a.log) == len(b.log) == len(keep["eve"].observed_c0) - 3
    assert a.finished and b.finished


def test_determinism():
    o1, o2 = run_protocol(CFG, seed=11), run_protocol(CFG, seed=11)
    assert asdict(o1) == asdict(o2)
    assert run_protocol(CFG, seed=12).key_a != o1.key_a


def test_empty_input():
    outcome = run_protocol(ProtocolConfig(n0=0))
    assert outcome.verdict == ABORT and outcome.reason == "empty input"


def test_insufficient_material():
    outcome = run_protocol(ProtocolConfig(n0=64), seed=0)
    assert outcome.verdict == ABORT and outcome.reason == "insufficient key material"
    assert not outcome.detected


def test_noiseless_channel():
    outcome = run_protocol(ProtocolConfig(n0=1024, p_ab=0.0, rounds=1), seed=0)
    assert outcome.verdict == SUCCESS and outcome.residual_error == 0.0


def test_valid_integrity_frame_moves_a_to_done():
    a, b, deliveries = drive(CFG)
    assert a.finished and b.finished
    new_phase, old_phase, role, msg = next(d for d in deliveries if d[3].label == "integrity")
    assert role == "A" and old_phase is Phase.INTEGRITY_VERIFY and new_phase is Phase.DONE


def test_failure_aborts_in_every_phase():
    seen = set()
    a2, b2 = TagA(CFG, np.random.default_rng(0)), SensorB(CFG, np.random.default_rng(1))
    peer = {"A": b2, "B": a2}
    queue = deque((peer[p.role], m) for p in (a2, b2) for m in p.start())
    while queue:
        dest, msg = queue.popleft()
        for party in (a2, b2):
            new, out = step(party, FAILURE)
            assert new.phase is Phase.ABORT and new.reason == "peer reported failure" and out == []
            seen.add((party.role, party.phase))
        queue.extend((peer[dest.role], m) for m in dest.handle(msg))
    assert {phase for role, phase in seen if role == "A"} >= {
        Phase.RAW_EXCHANGE, Phase.DISTILL, Phase.RECONCILE, Phase.INTEGRITY_VERIFY, Phase.DONE
    }


def test_oversized_raw_frame_aborts():
    a = TagA(CFG, np.random.default_rng(0))
    a.start()
    new, out = step(a, Message(RAW, "raw", np.zeros(CFG.n0 + 1, dtype=np.uint8)))
    assert new.phase is Phase.ABORT and new.reason == "malformed frame"
    assert out == [FAILURE]
    assert a.phase is Phase.RAW_EXCHANGE  # step leaves the input state alone


def test_aborted_party_ignores_everything():
    a = TagA(CFG, np.random.default_rng(0))
    a.start()
    a.handle(FAILURE)
    assert a.handle(Message(RAW, "raw", np.zeros(CFG.n0, dtype=np.uint8))) == []
    assert a.phase is Phase.ABORT


ADVERSARIES = ["passive", "jam:q=0.03", "tamper:q=0.05", "tamper:k=1", "tamper:all",
               "tamper:q=0.2,mode=stream", "tamper:k=2,only=hash_id", "tamper:q=0.5,only=integrity"]


@pytest.mark.parametrize("adversary", ADVERSARIES)
def test_trichotomy_and_phase_monotonicity(adversary):
    cfg = ProtocolConfig(n0=2048, adversary=adversary)
    for s in range(15):
        keep = {}
        o = run_protocol(cfg, seed=s, keep=keep)
        assert o.verdict in (SUCCESS, ABORT, UNDETECTED)
        assert (o.verdict == SUCCESS) == (keep["a"].finished and keep["b"].finished and o.key_match)
        if o.verdict == UNDETECTED:
            assert not o.key_match
        for party in (keep["a"], keep["b"]):
            h = party.history
            assert all(x <= y for x, y in zip(h, h[1:]))


def test_tampering_is_caught():
    cfg = ProtocolConfig(n0=2048, adversary="tamper:q=0.05")
    outcomes = [run_protocol(cfg, seed=s) for s in range(40)]
    assert all(o.verdict == ABORT and o.detected for o in outcomes if o.tampered)
    assert any(o.tampered for o in outcomes)


def test_jamming_raises_effective_error():
    base = run_protocol(CFG, seed=2)
    jammed = run_protocol(ProtocolConfig(n0=2048, adversary="jam:q=0.05"), seed=2)
    assert jammed.p_ab_effective > base.p_ab_effective


def test_measurements_are_none_not_nan():
    o = run_protocol(ProtocolConfig(n0=64), seed=0)
    assert o.key_a is None and o.eve_agreement is None
    for value in asdict(o).values():
        assert not (isinstance(value, float) and np.isnan(value))
