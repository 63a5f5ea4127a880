"""Key agreement by public discussion over noisy channels, shielded against
active adversaries with unidirectional codes over on-off keying."""

from .adversary import (
    FlipAllZeros,
    FlipEachZero,
    FlipKRandomZeros,
    Jammer,
    OokTamper,
    Passive,
    TargetedRegion,
    parse_adversary,
)
from .amplify import (
    HashFamily,
    HashId,
    TranscriptDigest,
    amplify,
    apply_hash,
    digest_transcript,
    select_hash,
    transcript_absorb,
)
from .bits import as_bits, to_str
from .cascade import CascadeConfig, CascadeSession, ReconciliationResult, run_cascade
from .channel import BinarySymmetricChannel, BscParams, OokFrame, transmit_bsc, transmit_ook
from .codes import BergerCode, CodewordRejected, ManchesterCode, check_non_inclusive_supports
from .config import ConfigError, ProtocolConfig
from .distill import distill, distill_round, iterate_error_rate, post_round_error_rate
from .integrity import ShieldedChannelParams, VerificationVerdict, shielded_receive, shielded_send
from .protocol import Phase, ProtocolOutcome, SensorB, TagA, run_protocol, step
from .sim import ExperimentReport, emit_csv, read_csv, run_experiment

__version__ = "0.1.0"
