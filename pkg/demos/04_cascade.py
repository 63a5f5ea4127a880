"""
Cascade reconciliation
======================

B corrects its string toward A's by comparing block parities and bisecting
the blocks that disagree.  A flip found in a later pass re-opens the
earlier blocks containing that position.
"""

import math

import numpy as np

from shielded_ka import CascadeConfig, run_cascade
from shielded_ka.bits import hamming, random_bits

rng = np.random.default_rng(3)
n, p = 1024, 0.03
a = random_bits(n, rng)
b = a ^ (rng.random(n) < p).astype(np.uint8)

config = CascadeConfig(passes=4, initial_block_size=math.ceil(0.73 / p))
transcript = []
result = run_cascade(a, b, config, transcript)

print("errors before:", hamming(a, b))
print("errors after: ", hamming(a, result.corrected_b))
print("parity bits revealed:", result.bits_leaked, "over", result.exchanges, "exchanges")
print("first messages:", [(who, label, len(bits)) for who, label, bits in transcript[:5]])
