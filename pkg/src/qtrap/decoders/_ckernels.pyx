# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled decoder kernels. See ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

ctypedef cnp.int64_t idx_t
ctypedef unsigned char bit_t

BACKEND = "cython"

cnp.import_array()


cdef inline double _clip(double x, double c) nogil:
    if x > c:
        return c
    if x < -c:
        return -c
    return x


cdef int _mismatch(const idx_t[::1] chk_ptr, const idx_t[::1] edge_var,
                   const bit_t[::1] xhat, const bit_t[::1] sigma, bit_t[::1] beta) nogil:
    cdef Py_ssize_t c, k
    cdef int total = 0
    cdef bit_t s
    for c in range(sigma.shape[0]):
        s = sigma[c]
        for k in range(chk_ptr[c], chk_ptr[c + 1]):
            s ^= xhat[edge_var[k]]
        beta[c] = s
        total += s
    return total


def syndrome_mismatch(const idx_t[::1] chk_ptr, const idx_t[::1] edge_var, edge_check,
                      const bit_t[::1] xhat, const bit_t[::1] sigma, bit_t[::1] beta):
    return _mismatch(chk_ptr, edge_var, xhat, sigma, beta)


def bf_phase(const idx_t[::1] edge_check, edge_var, const idx_t[::1] var_ptr,
             const idx_t[::1] var_edges, const idx_t[::1] var_deg, bit_t[::1] xhat,
             bit_t[::1] beta, int[::1] alpha, Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t v, k
    cdef int a, nflip = 0
    with nogil:
        for v in range(lo, hi):
            a = 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                a += beta[edge_check[var_edges[k]]]
            alpha[v] = a
        for v in range(lo, hi):
            if 2 * alpha[v] > var_deg[v]:
                xhat[v] ^= 1
                nflip += 1
                for k in range(var_ptr[v], var_ptr[v + 1]):
                    beta[edge_check[var_edges[k]]] ^= 1
    return nflip


def minsum_run(const idx_t[::1] chk_ptr, const idx_t[::1] edge_var, const idx_t[::1] var_ptr,
               const idx_t[::1] var_edges, const idx_t[::1] edge_check, const bit_t[::1] sigma,
               const double[::1] bias, const double[::1] bmean, double w, int max_iters,
               double clip, int sched, Py_ssize_t n_vv, int decide_every, bit_t[::1] xhat,
               bit_t[:, ::1] trace):
    cdef Py_ssize_t n = xhat.shape[0]
    cdef Py_ssize_t mc = sigma.shape[0]
    cdef Py_ssize_t ne = edge_var.shape[0]
    cdef Py_ssize_t c, k, v, e, amin
    cdef int t, par, neg, flip, iters = max_iters
    cdef bint converged = False, record = trace.shape[0] > 0, active_vv
    cdef double mag, min1, min2, tot, excl
    cdef double[::1] m_vc = np.clip(np.asarray(bias, dtype=np.float64), -clip, clip)
    cdef double[::1] m_cv = np.zeros(ne, dtype=np.float64)
    cdef double[::1] total = np.zeros(n, dtype=np.float64)
    cdef bit_t[::1] beta = np.zeros(mc, dtype=np.uint8)

    with nogil:
        for v in range(n):
            xhat[v] = 1 if bmean[v] < 0 else 0
        if _mismatch(chk_ptr, edge_var, xhat, sigma, beta) == 0:
            iters = 0
            converged = True
        else:
            for t in range(1, max_iters + 1):
                # check to variable
                for c in range(mc):
                    if chk_ptr[c] == chk_ptr[c + 1]:
                        continue
                    min1 = clip
                    min2 = clip
                    amin = -1
                    par = sigma[c]
                    for k in range(chk_ptr[c], chk_ptr[c + 1]):
                        mag = fabs(m_vc[k])
                        if m_vc[k] < 0:
                            par ^= 1
                        if amin < 0 or mag < min1:
                            if amin >= 0:
                                min2 = min1
                            min1 = mag
                            amin = k
                        elif mag < min2:
                            min2 = mag
                    for k in range(chk_ptr[c], chk_ptr[c + 1]):
                        excl = min2 if k == amin else min1
                        neg = 1 if m_vc[k] < 0 else 0
                        flip = par ^ neg
                        m_cv[k] = -excl if flip else excl
                # totals and hard decision
                for v in range(n):
                    tot = 0.0
                    for k in range(var_ptr[v], var_ptr[v + 1]):
                        tot += m_cv[var_edges[k]]
                    total[v] = tot
                    xhat[v] = 1 if bmean[v] + tot < 0 else 0
                if record:
                    for v in range(n):
                        trace[t - 1, v] = xhat[v]
                if t % decide_every == 0 or t == max_iters:
                    if _mismatch(chk_ptr, edge_var, xhat, sigma, beta) == 0:
                        iters = t
                        converged = True
                        break
                # variable to check
                active_vv = (t % 2) == 1
                for e in range(ne):
                    v = edge_var[e]
                    if sched != 0 and (v < n_vv) != active_vv:
                        continue
                    m_vc[e] = _clip(bias[e] + w * (total[v] - m_cv[e]), clip)
    return iters, bool(converged)
