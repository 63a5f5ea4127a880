"""
Privacy amplification and transcript digests
============================================

A random Toeplitz matrix compresses the reconciled string to a short key.
The same family hashes the public transcript one message at a time.
"""

import numpy as np

from shielded_ka import amplify, digest_transcript, select_hash
from shielded_ka.amplify import hash_many
from shielded_ka.bits import random_bits, to_str

rng = np.random.default_rng(4)
shared = random_bits(512, rng)
hid = select_hash(rng, 512, 32)
print("hash id carries", hid.seed_length, "seed bits")
print("key:", to_str(amplify(shared, hid, 32)))

# a single flipped input bit changes the key completely
other = shared.copy()
other[100] ^= 1
print("key:", to_str(amplify(other, hid, 32)))

# empirical collision rate for t1 = 12 over fresh family members
n, m, N = 64, 12, 200_000
x = rng.integers(0, 2, (N, n), dtype=np.uint8)
y = x.copy()
y[:, 0] ^= 1
seeds = rng.integers(0, 2, (N, n + m - 1), dtype=np.uint8)
rate = np.all(hash_many(seeds, x, m) == hash_many(seeds, y, m), axis=1).mean()
print(f"collision rate {rate:.2e} vs 2^-12 = {2**-12:.2e}")

messages = [random_bits(k, rng) for k in (40, 7, 64)]
print("digest:", to_str(digest_transcript(hid, messages).bits))
