"""Decoder configuration and result types."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

__all__ = ["DecoderKind", "DecoderConfig", "DecodeOutcome", "channel_bias"]


class DecoderKind(str, enum.Enum):
    BF = "bf"
    TSBF = "tsbf"
    TSBF_RANDOM_TIEBREAK = "tsbf_random"
    MINSUM = "minsum"
    MINSUM_SCHEDULED = "minsum_scheduled"

    @property
    def is_minsum(self) -> bool:
        return self in (DecoderKind.MINSUM, DecoderKind.MINSUM_SCHEDULED)


def channel_bias(p: float) -> float:
    """``log((1-p)/p)``, the prior log-likelihood ratio of a bit flip at rate p."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"channel bias needs 0 < p < 1, got {p}")
    return math.log((1.0 - p) / p)


@dataclass(frozen=True, eq=False)
class DecoderConfig:
    """Settings for one decoder run.

    ``w``, ``edge_bias``, ``default_bias``, ``clip`` and ``decide_every``
    only matter for min-sum kinds; ``rng_seed`` only for the random
    tie-break variant. ``edge_bias`` is indexed by Tanner edge id.
    """

    kind: DecoderKind = DecoderKind.MINSUM
    max_iters: int = 100
    w: float = 0.75
    edge_bias: np.ndarray | None = None
    default_bias: float | None = None
    rng_seed: int | None = None
    decide_every: int = 1
    clip: float = 64.0
    record_trace: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DecoderKind(self.kind))
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.w > 0:
            raise ValueError("w must be positive")
        if self.decide_every < 1:
            raise ValueError("decide_every must be >= 1")
        if not self.clip > 0:
            raise ValueError("clip must be positive")
        if self.edge_bias is not None:
            b = np.ascontiguousarray(self.edge_bias, dtype=np.float64)
            if b.ndim != 1:
                raise ValueError("edge_bias must be 1-D")
            if not np.isfinite(b).all():
                raise ValueError("edge_bias contains non-finite values")
            b.setflags(write=False)
            object.__setattr__(self, "edge_bias", b)
        if self.default_bias is not None and not math.isfinite(self.default_bias):
            raise ValueError("default_bias must be finite")

    @property
    def label(self) -> str:
        return self.name or self.kind.value

    def with_channel(self, p: float) -> "DecoderConfig":
        """Fill ``default_bias`` from the channel when no bias is set."""
        if self.kind.is_minsum and self.edge_bias is None and self.default_bias is None:
            return replace(self, default_bias=channel_bias(p))
        return self

    def replace(self, **changes: Any) -> "DecoderConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        """Plain-data summary (biases reduced to a count and checksum)."""
        out: dict[str, Any] = {"kind": self.kind.value, "max_iters": self.max_iters, "name": self.label}
        if self.kind.is_minsum:
            out.update(w=self.w, clip=self.clip, decide_every=self.decide_every)
            if self.default_bias is not None:
                out["default_bias"] = self.default_bias
            if self.edge_bias is not None:
                out["edge_bias_len"] = int(self.edge_bias.shape[0])
                out["edge_bias_sum"] = float(self.edge_bias.sum())
        if self.rng_seed is not None:
            out["rng_seed"] = self.rng_seed
        return out


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    """Result of one decode.

    ``status`` is one of ``converged``, ``stalled`` (no flips, mismatch
    left), ``oscillating`` (a decoder state repeated), or ``max_iters``.
    ``trace[t]`` is the estimate after ``t`` iterations when recorded.
    """

    estimate: np.ndarray
    converged: bool
    iters_used: int
    status: str
    trace: np.ndarray | None = None
    member: int | None = field(default=None)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.estimate))
