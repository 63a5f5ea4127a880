"""
One full key agreement
======================

The driver routes messages between the tag (A) and the sensor (B): a noisy
raw stream, distillation, Cascade, amplification, the hash announcement,
the integrity check and key confirmation.
"""

from shielded_ka import ProtocolConfig, run_protocol

config = ProtocolConfig(n0=4096, p_ab=0.1, p_ae=0.15)
keep = {}
outcome = run_protocol(config, seed=2024, keep=keep)

for m in keep["eve"].observed_c0[:6]:
    print(f"{m.sender}: {m.label:<8} {len(m.bits):5d} bits")
print("...")
for m in keep["eve"].observed_c0[-4:]:
    print(f"{m.sender}: {m.label:<8} {len(m.bits):5d} bits")

print("verdict:", outcome.verdict)
print("distilled length:", outcome.n_k, "parity bits leaked:", outcome.bits_leaked)
print("key A:", outcome.key_a)
print("key B:", outcome.key_b)
print("Eve's per-bit agreement with the key:", outcome.eve_agreement)
