"""Bit-flipping decoders: plain, VV/CC phased, and phased with tie-break."""

from __future__ import annotations

import numpy as np

from ..tanner import TannerGraph
from ._backend import kernels
from .config import DecodeOutcome, DecoderConfig, DecoderKind

__all__ = ["bf_decode", "tsbf_decode", "tsbf_random_tiebreak_decode", "check_syndrome"]


def check_syndrome(graph: TannerGraph, sigma) -> np.ndarray:
    s = np.ascontiguousarray(sigma, dtype=np.uint8)
    if s.ndim != 1 or s.shape[0] != graph.check_count:
        raise ValueError(f"syndrome length {s.shape} does not match {graph.check_count} checks")
    if s.size and s.max() > 1:
        raise ValueError("syndrome entries must be 0 or 1")
    return s


def _run(graph: TannerGraph, sigma, cfg: DecoderConfig, phases: list[tuple[int, int]],
         rng: np.random.Generator | None = None) -> DecodeOutcome:
    k = kernels()
    sigma = check_syndrome(graph, sigma)
    n = graph.var_count
    xhat = np.zeros(n, dtype=np.uint8)
    beta = np.zeros(graph.check_count, dtype=np.uint8)
    alpha = np.zeros(n, dtype=np.intc)
    deg = graph.var_degree
    args = (graph.edge_check, graph.edge_var, graph.var_ptr, graph.var_edges, deg)
    trace = [xhat.copy()] if cfg.record_trace else []

    def done(status: str, it: int) -> DecodeOutcome:
        tr = np.array(trace, dtype=np.uint8) if cfg.record_trace else None
        return DecodeOutcome(xhat, status == "converged", it, status, tr)

    if k.syndrome_mismatch(graph.chk_ptr, graph.edge_var, graph.edge_check, xhat, sigma, beta) == 0:
        return done("converged", 0)

    # the state (estimate, next phase) fixes the future of a deterministic run
    seen: set[tuple[bytes, int]] | None = None if rng is not None else {(xhat.tobytes(), 0)}
    idle = 0
    ph = 0
    for it in range(1, cfg.max_iters + 1):
        lo, hi = phases[ph]
        nflip = k.bf_phase(*args, xhat, beta, alpha, lo, hi)
        if nflip == 0 and rng is not None:
            a, d = alpha[lo:hi], deg[lo:hi]
            cand = lo + np.flatnonzero((a == d // 2) & (a > 0))
            if cand.size:
                v = int(cand[rng.integers(cand.size)])
                xhat[v] ^= 1
                beta[graph.checks_of(v)] ^= 1
                nflip = 1
        if cfg.record_trace:
            trace.append(xhat.copy())
        if not beta.any():
            return done("converged", it)
        idle = 0 if nflip else idle + 1
        if idle >= len(phases):
            return done("stalled", it)
        ph = (ph + 1) % len(phases)
        if seen is not None:
            key = (xhat.tobytes(), ph)
            if key in seen:
                return done("oscillating", it)
            seen.add(key)
    return done("max_iters", cfg.max_iters)


def bf_decode(graph: TannerGraph, sigma, cfg: DecoderConfig | None = None) -> DecodeOutcome:
    """Flip, all at once, every variable with more than half its checks unsatisfied."""
    cfg = cfg or DecoderConfig(DecoderKind.BF)
    return _run(graph, sigma, cfg, [(0, graph.var_count)])


def _phases(graph: TannerGraph) -> list[tuple[int, int]]:
    return [(0, graph.n_vv), (graph.n_vv, graph.var_count)]


def tsbf_decode(graph: TannerGraph, sigma, cfg: DecoderConfig | None = None) -> DecodeOutcome:
    """Alternate majority flips between the VV block and the CC block.

    Each phase counts as one iteration. A run stalls once a VV phase and a CC
    phase in a row flip nothing.
    """
    cfg = cfg or DecoderConfig(DecoderKind.TSBF)
    return _run(graph, sigma, cfg, _phases(graph))


def tsbf_random_tiebreak_decode(graph: TannerGraph, sigma, cfg: DecoderConfig) -> DecodeOutcome:
    """:func:`tsbf_decode` that, when a phase would flip nothing, flips one
    random node of the active type sitting exactly at ``deg // 2``
    unsatisfied checks."""
    if cfg.rng_seed is None:
        raise ValueError("tie-break decoder needs cfg.rng_seed")
    rng = np.random.default_rng(cfg.rng_seed)
    return _run(graph, sigma, cfg, _phases(graph), rng)
