"""
Advantage distillation by bit pairs
===================================

A and B publish the parity of each consecutive pair and keep the first bit
of the pairs whose parities agree.  Their error rate falls quickly.  Eve
sees the same public parities but her noise played no part in the
selection, so her error rate on the kept bits stays where it was.
"""

import numpy as np

from shielded_ka import distill, iterate_error_rate
from shielded_ka.bits import hamming, random_bits

rng = np.random.default_rng(2)
n, p = 200_000, 0.15
a = random_bits(n, rng)
b = a ^ (rng.random(n) < p).astype(np.uint8)
e = a ^ (rng.random(n) < p).astype(np.uint8)

print("round  kept      A-B err   predicted  A-E err")
for k, r in enumerate(distill(a, b, rounds=3), start=1):
    e = e[r.kept_indices]
    d_ab = hamming(r.a_kept, r.b_kept) / len(r.a_kept)
    d_ae = hamming(r.a_kept, e) / len(e)
    print(f"{k:5d}  {len(r.a_kept):7d}  {d_ab:.5f}   {iterate_error_rate(p, k):.5f}    {d_ae:.5f}")
