"""Batch Monte Carlo experiments and CSV output.

Trial ``i`` of an experiment is seeded with
``SeedSequence(master_seed, spawn_key=(i,))``; its outcome therefore does
not depend on how many trials run or in which order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .config import ProtocolConfig
from .protocol import ABORT, SUCCESS, UNDETECTED, ProtocolOutcome, run_protocol

CSV_COLUMNS = ("trial", "outcome", "key_match", "detected", "bits_leaked", "eve_agreement", "p_ab_effective", "n_k")
AGGREGATE_LABEL = "aggregate"
VERDICTS = (SUCCESS, ABORT, UNDETECTED)


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def run_trial(config: ProtocolConfig, index: int) -> ProtocolOutcome:
    return run_protocol(config, seed=trial_seed(config.master_seed, index))


def _mean(values) -> Optional[float]:
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


@dataclass
class ExperimentReport:
    config: ProtocolConfig
    rows: List[ProtocolOutcome] = field(default_factory=list)

    def rate(self, verdict: str) -> float:
        return sum(r.verdict == verdict for r in self.rows) / len(self.rows)

    @property
    def aggregates(self) -> Dict[str, Optional[float]]:
        rows = self.rows
        return {
            "success_rate": self.rate(SUCCESS),
            "abort_rate": self.rate(ABORT),
            "undetected_rate": self.rate(UNDETECTED),
            "key_match_rate": float(np.mean([r.key_match for r in rows])),
            "detection_rate": float(np.mean([r.detected for r in rows])),
            "mean_bits_leaked": float(np.mean([r.bits_leaked for r in rows])),
            "mean_eve_agreement": _mean(r.eve_agreement for r in rows),
            "mean_p_ab_effective": _mean(r.p_ab_effective for r in rows),
            "mean_n_k": float(np.mean([r.n_k for r in rows])),
            "mean_distilled_error": _mean(r.distilled_error for r in rows),
            "mean_residual_error": _mean(r.residual_error for r in rows),
        }


def run_experiment(config: ProtocolConfig, workers: int = 1) -> ExperimentReport:
    """Run ``config.trials`` independent trials; ``workers > 1`` uses processes."""
    indices = range(config.trials)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_trial, [config] * config.trials, indices, chunksize=16))
    else:
        rows = [run_trial(config, i) for i in indices]
    return ExperimentReport(config, rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_rows(report: ExperimentReport) -> List[List[str]]:
    out = []
    for i, r in enumerate(report.rows):
        out.append(
            [_fmt(v) for v in (i, r.verdict, r.key_match, r.detected, r.bits_leaked, r.eve_agreement, r.p_ab_effective, r.n_k)]
        )
    agg = report.aggregates
    outcome = ";".join(f"{v}={_fmt(report.rate(v))}" for v in VERDICTS)
    out.append(
        [
            AGGREGATE_LABEL,
            outcome,
            _fmt(agg["key_match_rate"]),
            _fmt(agg["detection_rate"]),
            _fmt(agg["mean_bits_leaked"]),
            _fmt(agg["mean_eve_agreement"]),
            _fmt(agg["mean_p_ab_effective"]),
            _fmt(agg["mean_n_k"]),
        ]
    )
    return out


def emit_csv(report: ExperimentReport, destination) -> None:
    """Write a header, one row per trial and a final aggregate row.

    ``destination`` is a path or a text stream.  In the aggregate row the
    ``outcome`` cell holds ``success=..;abort=..;undetected_mismatch=..``
    and the other cells hold means (rates for the 0/1 columns).
    """
    if not report.rows:
        raise ValueError("cannot emit an empty report")
    if hasattr(destination, "write"):
        _write(report, destination)
    else:
        with open(destination, "w", newline="", encoding="ascii") as fh:
            _write(report, fh)


def _write(report, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(report_rows(report))


def csv_text(report: ExperimentReport) -> str:
    buf = io.StringIO()
    emit_csv(report, buf)
    return buf.getvalue()


def _parse(cell: str):
    return None if cell == "" else float(cell)


def read_csv(source) -> Dict[str, object]:
    """Parse an emitted CSV back into trial rows and aggregate values."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="", encoding="ascii") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    trials, aggregate = [], None
    for row in reader:
        if row["trial"] == AGGREGATE_LABEL:
            rates = dict(item.split("=") for item in row["outcome"].split(";"))
            aggregate = {
                "success_rate": float(rates[SUCCESS]),
                "abort_rate": float(rates[ABORT]),
                "undetected_rate": float(rates[UNDETECTED]),
                "key_match_rate": _parse(row["key_match"]),
                "detection_rate": _parse(row["detected"]),
                "mean_bits_leaked": _parse(row["bits_leaked"]),
                "mean_eve_agreement": _parse(row["eve_agreement"]),
                "mean_p_ab_effective": _parse(row["p_ab_effective"]),
                "mean_n_k": _parse(row["n_k"]),
            }
        else:
            trials.append(row)
    if aggregate is None:
        raise ValueError("CSV has no aggregate row")
    return {"trials": trials, "aggregate": aggregate}


SUMMARY_COLUMNS = (
    "n0", "p_ab", "p_ae", "rounds", "t1", "key_len", "adversary", "trials",
    "success_rate", "abort_rate", "undetected_rate", "detection_rate",
    "mean_eve_agreement", "mean_bits_leaked", "mean_n_k",
)


def summary_row(report: ExperimentReport) -> List[str]:
    c, agg = report.config, report.aggregates
    values = [c.n0, c.p_ab, c.p_ae, c.distill_rounds, c.t1, c.key_len, c.adversary, c.trials]
    values += [agg[k] for k in SUMMARY_COLUMNS[8:]]
    return [_fmt(v) for v in values]


def binomial_upper(rate: float, trials: int, sigmas: float = 5.0) -> float:
    """``rate`` plus ``sigmas`` binomial standard deviations over ``trials`` draws."""
    return rate + sigmas * math.sqrt(rate * (1 - rate) / trials)
