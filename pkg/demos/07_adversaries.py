"""
Tampering, jamming and what the parties see
===========================================

A tampering adversary can only force an abort.  A jammer raises the noise
on the raw stream; distillation and Cascade absorb it until the error rate
grows too large.
"""

from collections import Counter

from shielded_ka import ProtocolConfig, run_experiment

for adversary in ("passive", "tamper:k=1", "tamper:q=0.02,mode=stream", "tamper:k=1,only=hash_id",
                  "jam:q=0.05", "jam:q=0.2"):
    report = run_experiment(ProtocolConfig(n0=2048, adversary=adversary, trials=40))
    verdicts = Counter(r.verdict for r in report.rows)
    reasons = Counter(r.reason for r in report.rows if r.reason)
    print(f"{adversary:<28} {dict(verdicts)}  {dict(reasons)}")
