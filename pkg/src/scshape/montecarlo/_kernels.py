"""Compiled windowed sum-product decoding loop."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["windowed_bp"]

# atanh argument bound: keeps c2v finite even before the LLR clip applies.
_TANH_LIM = 0.9999999999999998


@njit(cache=True)
def windowed_bp(
    indptr,
    indices,
    llr,
    row_concat,
    row_off,
    bit_concat,
    bit_off,
    local_iters,
    clip,
    early_exit,
    posterior_out,
    trace_out,
):
    """Sliding-window sum-product BP in the LLR domain.

    ``row_concat``/``row_off`` list the active CN rows per window stop
    (CNs with any neighbor outside the window stay frozen: their outgoing
    messages keep the last value, initially 0).  ``bit_concat``/``bit_off``
    list the window's bits for the syndrome stop rule and the
    min-posterior trace.  Messages persist across stops.  Returns the
    number of sweeps executed; posteriors land in ``posterior_out``.
    """
    n_edges = indices.shape[0]
    n_bits = llr.shape[0]
    c2v = np.zeros(n_edges)
    tt = np.zeros(n_edges)  # tanh(v2c/2), frozen posteriors' view per sweep
    fw = np.zeros(n_edges)  # forward partial products per row
    post = posterior_out
    for v in range(n_bits):
        post[v] = llr[v]

    n_stops = row_off.shape[0] - 1
    sweeps = 0
    for s in range(n_stops):
        r0 = row_off[s]
        r1 = row_off[s + 1]
        b0 = bit_off[s]
        b1 = bit_off[s + 1]
        for _ in range(local_iters):
            # Flooding half-iteration 1: every active CN reads the same
            # posterior snapshot.
            for x in range(r0, r1):
                r = row_concat[x]
                for e in range(indptr[r], indptr[r + 1]):
                    m = post[indices[e]] - c2v[e]
                    if m > clip:
                        m = clip
                    elif m < -clip:
                        m = -clip
                    tt[e] = math.tanh(0.5 * m)
            # Half-iteration 2: extrinsic tanh products via forward and
            # backward partials (division-free), posteriors updated
            # incrementally.
            for x in range(r0, r1):
                r = row_concat[x]
                e0 = indptr[r]
                e1 = indptr[r + 1]
                p = 1.0
                for e in range(e0, e1):
                    fw[e] = p
                    p *= tt[e]
                bwd = 1.0
                for e in range(e1 - 1, e0 - 1, -1):
                    prod = fw[e] * bwd
                    bwd *= tt[e]
                    if prod > _TANH_LIM:
                        prod = _TANH_LIM
                    elif prod < -_TANH_LIM:
                        prod = -_TANH_LIM
                    new = 2.0 * math.atanh(prod)
                    if new > clip:
                        new = clip
                    elif new < -clip:
                        new = -clip
                    post[indices[e]] += new - c2v[e]
                    c2v[e] = new
            sweeps += 1
            if early_exit:
                ok = True
                for x in range(r0, r1):
                    r = row_concat[x]
                    parity = 0
                    for e in range(indptr[r], indptr[r + 1]):
                        if post[indices[e]] < 0.0:
                            parity ^= 1
                    if parity:
                        ok = False
                        break
                if ok:
                    break
        tmin = math.inf
        for x in range(b0, b1):
            p = post[bit_concat[x]]
            if p < tmin:
                tmin = p
        trace_out[s] = tmin
    return sweeps
