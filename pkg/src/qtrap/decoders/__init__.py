"""Iterative syndrome decoders for CSS codes.

Hot loops live in a compiled extension when available, with numpy kernels
as a drop-in fallback (see :func:`backend_name`).
"""

from __future__ import annotations

from ..tanner import TannerGraph
from ._backend import available_backends, backend_name, set_backend
from .bitflip import bf_decode, tsbf_decode, tsbf_random_tiebreak_decode
from .config import DecodeOutcome, DecoderConfig, DecoderKind, channel_bias
from .ensemble import diversity_decode, select_outcome
from .minsum import minsum_decode, minsum_scheduled_decode, resolve_biases

__all__ = [
    "DecodeOutcome",
    "DecoderConfig",
    "DecoderKind",
    "available_backends",
    "backend_name",
    "bf_decode",
    "channel_bias",
    "decode",
    "diversity_decode",
    "minsum_decode",
    "minsum_scheduled_decode",
    "resolve_biases",
    "select_outcome",
    "set_backend",
    "tsbf_decode",
    "tsbf_random_tiebreak_decode",
]

_DISPATCH = {
    DecoderKind.BF: bf_decode,
    DecoderKind.TSBF: tsbf_decode,
    DecoderKind.TSBF_RANDOM_TIEBREAK: tsbf_random_tiebreak_decode,
    DecoderKind.MINSUM: minsum_decode,
    DecoderKind.MINSUM_SCHEDULED: minsum_scheduled_decode,
}


def decode(graph: TannerGraph, sigma, cfg: DecoderConfig) -> DecodeOutcome:
    """Run the decoder selected by ``cfg.kind``."""
    return _DISPATCH[cfg.kind](graph, sigma, cfg)
