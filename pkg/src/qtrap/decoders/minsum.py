"""Normalized min-sum with per-edge biases, flooding or VV/CC scheduled."""

from __future__ import annotations

import numpy as np

from ..tanner import TannerGraph
from ._backend import kernels
from .bitflip import check_syndrome
from .config import DecodeOutcome, DecoderConfig, DecoderKind

__all__ = ["minsum_decode", "minsum_scheduled_decode", "resolve_biases"]


def resolve_biases(graph: TannerGraph, cfg: DecoderConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-edge biases and the per-variable mean used for hard decisions."""
    if cfg.edge_bias is not None:
        if cfg.edge_bias.shape[0] != graph.edge_count:
            raise ValueError(f"edge_bias has {cfg.edge_bias.shape[0]} entries, graph has {graph.edge_count} edges")
        b = cfg.edge_bias
    elif cfg.default_bias is not None:
        b = np.full(graph.edge_count, cfg.default_bias, dtype=np.float64)
    else:
        raise ValueError("min-sum needs edge_bias or default_bias")
    deg = graph.var_degree
    sums = np.bincount(graph.edge_var, weights=b, minlength=graph.var_count)
    fallback = cfg.default_bias if cfg.default_bias is not None else 0.0
    bmean = np.where(deg > 0, sums / np.maximum(deg, 1), fallback)
    return np.ascontiguousarray(b, dtype=np.float64), np.ascontiguousarray(bmean, dtype=np.float64)


def _run(graph: TannerGraph, sigma, cfg: DecoderConfig, sched: int) -> DecodeOutcome:
    sigma = check_syndrome(graph, sigma)
    bias, bmean = resolve_biases(graph, cfg)
    xhat = np.zeros(graph.var_count, dtype=np.uint8)
    rows = cfg.max_iters if cfg.record_trace else 0
    trace = np.zeros((rows, graph.var_count), dtype=np.uint8)
    iters, converged = kernels().minsum_run(
        graph.chk_ptr, graph.edge_var, graph.var_ptr, graph.var_edges, graph.edge_check,
        sigma, bias, bmean, float(cfg.w), int(cfg.max_iters), float(cfg.clip), sched,
        int(graph.n_vv), int(cfg.decide_every), xhat, trace,
    )
    tr = None
    if cfg.record_trace:
        tr = np.vstack([(bmean < 0).astype(np.uint8)[None, :], trace[:iters]])
    return DecodeOutcome(xhat, bool(converged), int(iters), "converged" if converged else "max_iters", tr)


def minsum_decode(graph: TannerGraph, sigma, cfg: DecoderConfig) -> DecodeOutcome:
    """Flooding min-sum.

    Check messages carry the sign ``(-1)**sigma_c`` times the product of the
    other incoming signs and the minimum of the other magnitudes. Variable
    messages are ``b(e) + w * (sum of the other check messages)``. Estimate
    bit i is 1 when the mean bias of i plus all its check messages is negative.
    """
    return _run(graph, sigma, cfg, 0)


def minsum_scheduled_decode(graph: TannerGraph, sigma, cfg: DecoderConfig) -> DecodeOutcome:
    """Min-sum whose variable-to-check updates alternate between the VV
    edges (odd iterations) and the CC edges (even iterations)."""
    return _run(graph, sigma, cfg, 1)
