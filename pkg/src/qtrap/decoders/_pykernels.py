"""Numpy reference kernels. Same signatures and results as ``_ckernels``.

Float sums are accumulated in increasing edge order, matching the compiled
loops, so both backends produce bit-identical messages.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def syndrome_mismatch(chk_ptr, edge_var, edge_check, xhat, sigma, beta):
    """``beta = H xhat XOR sigma``; returns the number of unsatisfied checks."""
    m = sigma.shape[0]
    par = np.bincount(edge_check, weights=xhat[edge_var], minlength=m).astype(np.int64) & 1
    beta[:] = par.astype(np.uint8) ^ sigma
    return int(beta.sum(dtype=np.int64))


def bf_phase(edge_check, edge_var, var_ptr, var_edges, var_deg, xhat, beta, alpha, lo, hi):
    """One simultaneous flip pass over variables ``lo..hi-1``.

    Fills ``alpha[lo:hi]`` with unsatisfied-check counts, flips every variable
    with ``2*alpha > deg`` and updates ``beta`` in place. Returns the flip count.
    """
    n = xhat.shape[0]
    counts = np.bincount(edge_var, weights=beta[edge_check], minlength=n)
    alpha[lo:hi] = counts[lo:hi]
    flip = np.zeros(n, dtype=bool)
    flip[lo:hi] = 2 * alpha[lo:hi] > var_deg[lo:hi]
    nflip = int(flip.sum())
    if nflip:
        xhat[flip] ^= 1
        touched = edge_check[flip[edge_var]]
        beta ^= (np.bincount(touched, minlength=beta.shape[0]) & 1).astype(np.uint8)
    return nflip


def _check_update(chk_ptr, edge_check, m_vc, sign_sigma, clip, m_cv, starts, nonempty):
    mag = np.abs(m_vc)
    neg = m_vc < 0
    mc = chk_ptr.shape[0] - 1
    min1 = np.full(mc, clip)
    min2 = np.full(mc, clip)
    cnt = np.zeros(mc, dtype=np.int64)
    par = np.zeros(mc, dtype=np.int64)
    if starts.size:
        min1[nonempty] = np.minimum.reduceat(mag, starts)
        is_min = mag == min1[edge_check]
        rest = np.where(is_min, np.inf, mag)
        m2 = np.minimum.reduceat(rest, starts)
        min2[nonempty] = np.where(np.isinf(m2), clip, m2)
        cnt[nonempty] = np.add.reduceat(is_min.astype(np.int64), starts)
        par[nonempty] = np.add.reduceat(neg.astype(np.int64), starts) & 1
    else:
        is_min = np.zeros(0, dtype=bool)
    # with a tied minimum every edge still sees min1 among the others
    excl = np.where(is_min & (cnt[edge_check] == 1), min2[edge_check], min1[edge_check])
    flip = (par[edge_check] ^ neg.astype(np.int64) ^ sign_sigma[edge_check]).astype(bool)
    np.copyto(m_cv, np.where(flip, -excl, excl))


def minsum_run(chk_ptr, edge_var, var_ptr, var_edges, edge_check, sigma, bias, bmean, w,
               max_iters, clip, sched, n_vv, decide_every, xhat, trace):
    """Normalized min-sum with per-edge biases.

    ``sched`` 0 is flooding; 1 updates VV-edge messages on odd iterations and
    CC-edge messages on even ones. ``xhat`` receives the final hard decision
    and row ``t-1`` of ``trace`` (if it has rows) the decision at iteration t.
    Returns ``(iterations, converged)``.
    """
    n = xhat.shape[0]
    mc = sigma.shape[0]
    ne = edge_var.shape[0]
    beta = np.zeros(mc, dtype=np.uint8)
    record = trace.shape[0] > 0

    xhat[:] = (bmean < 0).astype(np.uint8)
    if syndrome_mismatch(chk_ptr, edge_var, edge_check, xhat, sigma, beta) == 0:
        return 0, True

    degs = np.diff(chk_ptr)
    nonempty = np.flatnonzero(degs > 0)
    starts = chk_ptr[:-1][nonempty]
    sign_sigma = sigma.astype(np.int64)
    m_vc = np.clip(bias.astype(np.float64), -clip, clip)
    m_cv = np.zeros(ne, dtype=np.float64)
    is_vv_edge = edge_var < n_vv

    for t in range(1, max_iters + 1):
        _check_update(chk_ptr, edge_check, m_vc, sign_sigma, clip, m_cv, starts, nonempty)
        total = np.bincount(edge_var, weights=m_cv, minlength=n)
        xhat[:] = ((bmean + total) < 0).astype(np.uint8)
        if record:
            trace[t - 1] = xhat
        if t % decide_every == 0 or t == max_iters:
            if syndrome_mismatch(chk_ptr, edge_var, edge_check, xhat, sigma, beta) == 0:
                return t, True
        new = np.clip(bias + w * (total[edge_var] - m_cv), -clip, clip)
        if sched == 0:
            m_vc = new
        else:
            active = is_vv_edge if t % 2 == 1 else ~is_vv_edge
            m_vc = np.where(active, new, m_vc)
    return max_iters, False
