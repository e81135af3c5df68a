"""Decoder diversity: run several configurations, keep the lightest success."""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from ..tanner import TannerGraph
from .config import DecodeOutcome, DecoderConfig

__all__ = ["diversity_decode", "select_outcome"]


def select_outcome(outcomes: Sequence[DecodeOutcome]) -> DecodeOutcome:
    """Minimum-weight converged outcome (ties to the lower index), else member 0."""
    if not outcomes:
        raise ValueError("no outcomes to select from")
    best = None
    for i, out in enumerate(outcomes):
        if out.converged and (best is None or out.weight < outcomes[best].weight):
            best = i
    idx = 0 if best is None else best
    return replace(outcomes[idx], member=idx)


def diversity_decode(graph: TannerGraph, sigma, members: Sequence[DecoderConfig]) -> DecodeOutcome:
    if not members:
        raise ValueError("diversity_decode needs at least one member")
    from . import decode

    return select_outcome([decode(graph, sigma, cfg) for cfg in members])
