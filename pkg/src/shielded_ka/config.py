"""Run configuration shared by the protocol parties, the driver and the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .adversary import AdversaryStrategy, parse_adversary
from .cascade import CascadeConfig, default_initial_block_size
from .codes import BergerCode, ManchesterCode, UnidirectionalCode
from .distill import iterate_error_rate, rounds_for_target

CODES = {"berger": BergerCode, "manchester": ManchesterCode}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolConfig:
    """All tunables of one key-agreement experiment.

    ``k1=None`` sizes Cascade blocks as ``ceil(0.73 / p_est)`` from the
    predicted post-distillation error, capped so the first pass has at least
    ``min_blocks`` blocks.  ``target_error``, when set, replaces ``rounds``
    by the number of distillation rounds the analytic error recursion needs
    to reach it.
    """

    n0: int = 4096
    p_ab: float = 0.1
    p_ae: float = 0.15
    rounds: int = 2
    cascade_passes: int = 4
    k1: Optional[int] = None
    t1: int = 32
    key_len: int = 32
    code: str = "berger"
    adversary: str = "passive"
    master_seed: int = 0
    trials: int = 1
    min_blocks: int = 8
    target_error: Optional[float] = None

    def __post_init__(self):
        if self.n0 < 0:
            raise ConfigError("n0 must be non-negative")
        for name in ("p_ab", "p_ae"):
            p = getattr(self, name)
            if not 0.0 <= p < 0.5:
                raise ConfigError(f"{name} must lie in [0, 0.5), got {p}")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.cascade_passes < 1:
            raise ConfigError("cascade_passes must be >= 1")
        if self.k1 is not None and self.k1 < 1:
            raise ConfigError("k1 must be >= 1")
        if self.t1 < 1:
            raise ConfigError("t1 must be >= 1")
        if not 1 <= self.key_len <= self.t1:
            raise ConfigError(f"key_len must lie in [1, t1={self.t1}], got {self.key_len}")
        if self.code not in CODES:
            raise ConfigError(f"unknown code {self.code!r}; choose from {sorted(CODES)}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.target_error is not None and not 0 < self.target_error < 0.5:
            raise ConfigError("target_error must lie in (0, 0.5)")
        try:
            parse_adversary(self.adversary)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def distill_rounds(self) -> int:
        if self.target_error is None:
            return self.rounds
        return rounds_for_target(self.p_ab, self.target_error) if self.p_ab > 0 else 1

    @property
    def hash_input_length(self) -> int:
        return max(self.n0 >> self.distill_rounds, 2 * self.t1)

    @property
    def p_est(self) -> float:
        return iterate_error_rate(self.p_ab, self.distill_rounds)

    def block_size(self, n: int) -> int:
        if self.k1 is not None:
            return self.k1
        return default_initial_block_size(self.p_est, max(n, 1), self.min_blocks)

    def cascade_config(self, n: int) -> CascadeConfig:
        return CascadeConfig(self.cascade_passes, self.block_size(n))

    def make_code(self) -> UnidirectionalCode:
        return CODES[self.code](self.t1)

    def strategy(self) -> AdversaryStrategy:
        return parse_adversary(self.adversary)
