"""
A shielded frame
================

A payload travels together with the coded hash of itself.  Tampering with
the tail is always caught; tampering with the payload slips through only
when the new payload collides under the hash.
"""

import numpy as np

from shielded_ka import BergerCode, ShieldedChannelParams, select_hash, shielded_receive, shielded_send
from shielded_ka.adversary import FlipEachZero, OokTamper, tamper
from shielded_ka.bits import random_bits

rng = np.random.default_rng(1)
t1, n = 16, 48
params = ShieldedChannelParams(n, select_hash(rng, n, t1), BergerCode(t1))

s = random_bits(n, rng)
frame = shielded_send(s, params)
print("frame length:", len(frame.payload), "=", n, "+", params.t2)
print("honest delivery:", shielded_receive(frame, params))

# an attacker raising each silent period with probability 0.1
attack = OokTamper(FlipEachZero(0.1))
altered = caught = 0
for _ in range(2000):
    received = tamper(attack, frame.payload, rng)
    if np.array_equal(received, frame.payload):
        continue  # no silent period was hit
    altered += 1
    caught += not shielded_receive(received, params)
print(f"caught {caught} of {altered} altered frames")
