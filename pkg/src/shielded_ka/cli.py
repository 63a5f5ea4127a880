"""Command-line entry point: ``shielded-ka run`` and ``shielded-ka sweep``."""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
from dataclasses import replace
from typing import List, Optional

from .config import ConfigError, ProtocolConfig
from .protocol import run_protocol
from .sim import SUMMARY_COLUMNS, emit_csv, run_experiment, summary_row, trial_seed

SEED_ENV = "SHIELDED_KA_SEED"


def _list(kind):
    def parse(text: str):
        try:
            return [kind(item) for item in text.split(",")]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _add_common(p: argparse.ArgumentParser, grid: bool) -> None:
    num = (lambda k: _list(k)) if grid else (lambda k: k)
    d = ProtocolConfig()
    p.add_argument("--n0", type=num(int), default=d.n0, help="raw bits streamed by B")
    p.add_argument("--p-ab", type=num(float), default=d.p_ab, help="BSC error rate B->A")
    p.add_argument("--p-ae", type=num(float), default=d.p_ae, help="BSC error rate to Eve")
    p.add_argument("--rounds", type=num(int), default=d.rounds, help="distillation rounds")
    p.add_argument("--target-eps", type=float, default=None, help="choose rounds to reach this predicted error")
    p.add_argument("--passes", type=int, default=d.cascade_passes, help="Cascade passes")
    p.add_argument("--k1", type=int, default=None, help="initial Cascade block size (default: auto)")
    p.add_argument("--t1", type=num(int), default=d.t1, help="hash output bits")
    p.add_argument("--key-len", type=num(int), default=None, help="key bits (default: t1)")
    p.add_argument("--code", choices=("berger", "manchester"), default=d.code)
    p.add_argument(
        "--adversary",
        action="append" if grid else "store",
        default=None,
        help="passive | tamper:q=..|k=..|all|start=..,stop=..[,mode=stream] | jam:q=..",
    )
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", default=None, help="CSV output path")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    return int(env) if env else 0


def _config(args, **values) -> ProtocolConfig:
    t1 = values.get("t1", args.t1)
    key_len = values.get("key_len", args.key_len)
    return ProtocolConfig(
        n0=values.get("n0", args.n0),
        p_ab=values.get("p_ab", args.p_ab),
        p_ae=values.get("p_ae", args.p_ae),
        rounds=values.get("rounds", args.rounds),
        target_error=args.target_eps,
        cascade_passes=args.passes,
        k1=args.k1,
        t1=t1,
        key_len=t1 if key_len is None else key_len,
        code=args.code,
        adversary=values.get("adversary", args.adversary) or "passive",
        master_seed=_seed(args),
        trials=args.trials,
    )


def _trace(config: ProtocolConfig) -> None:
    keep = {}
    outcome = run_protocol(config, seed=trial_seed(config.master_seed, 0), keep=keep)
    eve = keep.get("eve")
    if eve is not None:
        for k, m in enumerate(eve.observed_c0):
            print(f"{k:5d}  {m.sender} -> {'B' if m.sender == 'A' else 'A'}  {m.label:<9} {len(m.bits):6d} bits")
    print(f"outcome:        {outcome.verdict}" + (f" ({outcome.reason})" if outcome.reason else ""))
    print(f"raw error:      {outcome.raw_error}")
    print(f"distilled n_k:  {outcome.n_k}  error {outcome.distilled_error}")
    print(f"bits leaked:    {outcome.bits_leaked}")
    print(f"residual error: {outcome.residual_error}")
    print(f"tampered:       {outcome.tampered}  detected: {outcome.detected}")
    print(f"eve agreement:  {outcome.eve_agreement}")
    print(f"key A:          {outcome.key_a}")
    print(f"key B:          {outcome.key_b}")


def cmd_run(args) -> int:
    config = _config(args)
    if config.trials == 1 and not args.quiet:
        _trace(config)
    report = run_experiment(config, workers=args.workers)
    if args.out:
        emit_csv(report, args.out)
    elif config.trials > 1 or args.quiet:
        emit_csv(report, sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    grid = {
        "n0": args.n0 if isinstance(args.n0, list) else [args.n0],
        "p_ab": args.p_ab if isinstance(args.p_ab, list) else [args.p_ab],
        "p_ae": args.p_ae if isinstance(args.p_ae, list) else [args.p_ae],
        "rounds": args.rounds if isinstance(args.rounds, list) else [args.rounds],
        "t1": args.t1 if isinstance(args.t1, list) else [args.t1],
        "key_len": args.key_len if isinstance(args.key_len, list) else [args.key_len],
        "adversary": args.adversary or ["passive"],
    }
    configs = [_config(args, **dict(zip(grid, combo))) for combo in itertools.product(*grid.values())]
    out = open(args.out, "w", newline="", encoding="ascii") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for config in configs:
            writer.writerow(summary_row(run_experiment(config, workers=args.workers)))
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shielded-ka", description="Noisy-channel key agreement simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run trials; a single trial prints a message trace")
    _add_common(run, grid=False)
    run.add_argument("--quiet", action="store_true", help="no trace; CSV to stdout if --out is absent")
    run.set_defaults(func=cmd_run)
    sweep = sub.add_parser("sweep", help="grid of experiments; numeric flags take comma lists")
    _add_common(sweep, grid=True)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
