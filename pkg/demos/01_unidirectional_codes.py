"""
Unidirectional codes on an on-off keyed link
============================================

On-off keying lets an attacker add energy to a silent bit period but not
remove it, so every alteration turns some 0s into 1s.  A code whose
codewords never contain one another's support catches all such changes.
"""

import numpy as np

from shielded_ka import BergerCode, ManchesterCode, check_non_inclusive_supports
from shielded_ka.bits import as_bits, to_str

# Manchester doubles the length: 1 -> 10, 0 -> 01
man = ManchesterCode(4)
word = man.encode("1011")
print("Manchester 1011 ->", to_str(word))

# Berger appends the complemented binary weight of the source word
ber = BergerCode(8)
word = ber.encode("10110000")
print("Berger 10110000 ->", to_str(word), f"({ber.codeword_length} bits)")

# raising any 0 to 1 is rejected
forged = word.copy()
forged[np.flatnonzero(word == 0)[0]] = 1
print("forged word accepted?", ber.accepts(forged))

# brute-force check of the support property for a few lengths
for l in (4, 8, 12):
    print(f"l={l:2d}: Manchester ok={check_non_inclusive_supports(ManchesterCode(l))}, "
          f"Berger ok={check_non_inclusive_supports(BergerCode(l))}")

# the decoding rule returns the source word
print("decoded:", to_str(ber.verify(as_bits(word))))
