"""Compiled inner loops for the EXIT recursion.

The public engine API works on base-matrix-shaped arrays; these kernels
run the same recursion on a flat edge list (one entry per nonzero
base-matrix cell, weighted by its multiplicity) so that threshold
searches stay fast.  ``exit_sweep`` in the engine module is the readable
reference; tests pin the two against each other.

``jtab`` bundles the J-function table:
(grid, dx, values, c3, c2, c1, c0, sigma_max, inv_index, inv_scale).
``inv_index`` brackets the inverse's segment search per uniform MI bucket.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["flooding_converge", "windowed_converge"]


@njit(cache=True)
def _jf(s, jtab):
    # Forward PCHIP evaluation on the uniform sigma grid.
    grid, dx, values, c3, c2, c1, c0, sigma_max, inv_index, inv_scale = jtab
    if s <= 0.0:
        return 0.0
    if s >= sigma_max:
        return 1.0
    i = int(s / dx)
    nseg = c0.shape[0]
    if i >= nseg:
        i = nseg - 1
    t = s - grid[i]
    v = ((c3[i] * t + c2[i]) * t + c1[i]) * t + c0[i]
    if v < 0.0:
        v = 0.0
    elif v > 1.0:
        v = 1.0
    return v


@njit(cache=True)
def _jinv(y, jtab):
    # Bucket-bracketed binary search, then safeguarded Newton on the
    # segment cubic.
    grid, dx, values, c3, c2, c1, c0, sigma_max, inv_index, inv_scale = jtab
    n = values.shape[0]
    if y <= 0.0:
        return 0.0
    if y >= values[n - 1]:
        return sigma_max
    q = int(y * inv_scale)
    lo = inv_index[q]
    hi = inv_index[q + 1] + 1
    if hi > n - 1:
        hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if values[mid] <= y:
            lo = mid
        else:
            hi = mid
    y0 = values[lo]
    y1 = values[lo + 1]
    t = (y - y0) / (y1 - y0) * dx
    for _ in range(4):
        f = ((c3[lo] * t + c2[lo]) * t + c1[lo]) * t + c0[lo] - y
        df = (3.0 * c3[lo] * t + 2.0 * c2[lo]) * t + c1[lo]
        if df <= 0.0:
            df = 1.0
        t = t - f / df
        if t < 0.0:
            t = 0.0
        elif t > dx:
            t = dx
    return grid[lo] + t


@njit(cache=True)
def flooding_converge(
    rows,
    cols,
    bw,
    n_rows,
    n_cols,
    sigma_ch2,
    eps,
    max_iters,
    stall_tol,
    jtab,
    trace_out,
):
    """Synchronous EXIT iterations until min-APP target, stall, or cap.

    Returns (converged, iterations, slowest_type, final_min_app).
    A stall is a sup-norm APP change below ``stall_tol``; sub-threshold
    fixed points reach it geometrically while a moving decoding wave
    keeps the change well above it.
    """
    n_edges = rows.shape[0]
    i_ec = np.zeros(n_edges)
    i_ev = np.zeros(n_edges)
    u2 = np.zeros(n_edges)  # J^{-1}(i_ec)^2, refreshed by the APP pass
    d2 = np.zeros(n_edges)
    sv = np.zeros(n_cols)
    sc = np.zeros(n_rows)
    i_app = np.zeros(n_cols)
    i_app_prev = np.zeros(n_cols)

    converged = False
    it = 0
    slowest = 0
    min_app = 0.0
    for it in range(1, max_iters + 1):
        # VN update: i_ev = J(sqrt(sum_k' b*u^2 - u_self^2 + sigma_ch^2))
        for j in range(n_cols):
            sv[j] = 0.0
        for e in range(n_edges):
            sv[cols[e]] += bw[e] * u2[e]
        for e in range(n_edges):
            arg = sv[cols[e]] - u2[e] + sigma_ch2[cols[e]]
            if arg < 0.0:
                arg = 0.0
            i_ev[e] = _jf(np.sqrt(arg), jtab)
        # CN update: i_ec = 1 - J(sqrt(sum_j' b*d^2 - d_self^2))
        for e in range(n_edges):
            r = _jinv(1.0 - i_ev[e], jtab)
            d2[e] = r * r
        for k in range(n_rows):
            sc[k] = 0.0
        for e in range(n_edges):
            sc[rows[e]] += bw[e] * d2[e]
        for e in range(n_edges):
            arg = sc[rows[e]] - d2[e]
            if arg < 0.0:
                arg = 0.0
            i_ec[e] = 1.0 - _jf(np.sqrt(arg), jtab)
        # APP update from all incident CN messages plus the channel; the
        # refreshed u2 feeds the next VN update.
        for j in range(n_cols):
            sv[j] = 0.0
        for e in range(n_edges):
            r = _jinv(i_ec[e], jtab)
            u2[e] = r * r
            sv[cols[e]] += bw[e] * u2[e]
        min_app = 2.0
        for j in range(n_cols):
            a = _jf(np.sqrt(sv[j] + sigma_ch2[j]), jtab)
            i_app[j] = a
            if a < min_app:
                min_app = a
                slowest = j
        trace_out[it - 1] = min_app
        if min_app >= 1.0 - eps:
            converged = True
            break
        delta = 0.0
        for j in range(n_cols):
            d = abs(i_app[j] - i_app_prev[j])
            if d > delta:
                delta = d
            i_app_prev[j] = i_app[j]
        if it > 8 and delta < stall_tol:
            break
    return converged, it, slowest, min_app


@njit(cache=True)
def windowed_converge(
    rows,
    cols,
    bw,
    n_rows,
    n_cols,
    sigma_ch2,
    vn_eidx,
    vn_off,
    cn_eidx,
    cn_off,
    stops_per_pass,
    local_iters,
    eps,
    max_sweeps,
    stall_tol,
    jtab,
    trace_out,
):
    """Sliding-window EXIT schedule with persistent messages.

    ``vn_eidx``/``cn_eidx`` hold, per window stop, the edges whose VN
    (resp. CN) endpoint is active; offsets delimit the stops.  Messages
    of frozen CNs keep their last value.  Returns
    (converged, total_sweeps, stops_executed, slowest_type, final_min_app).
    """
    n_edges = rows.shape[0]
    i_ec = np.zeros(n_edges)
    i_ev = np.zeros(n_edges)
    u2 = np.zeros(n_edges)  # stays consistent: i_ec only changes on
    d2 = np.zeros(n_edges)  # CN-active edges, all refreshed by the APP pass
    sv = np.zeros(n_cols)
    sc = np.zeros(n_rows)
    i_app = np.empty(n_cols)
    snapshot = np.empty(n_cols)
    for j in range(n_cols):
        i_app[j] = _jf(np.sqrt(sigma_ch2[j]), jtab)
        snapshot[j] = i_app[j]

    n_stops = vn_off.shape[0] - 1
    total_sweeps = 0
    stops_done = 0
    converged = False
    slowest = 0
    min_app = 0.0
    for s in range(n_stops):
        if converged or total_sweeps >= max_sweeps:
            break
        a0 = vn_off[s]
        a1 = vn_off[s + 1]
        b0 = cn_off[s]
        b1 = cn_off[s + 1]
        for _ in range(local_iters):
            for x in range(a0, a1):
                sv[cols[vn_eidx[x]]] = 0.0
            for x in range(a0, a1):
                e = vn_eidx[x]
                sv[cols[e]] += bw[e] * u2[e]
            for x in range(a0, a1):
                e = vn_eidx[x]
                arg = sv[cols[e]] - u2[e] + sigma_ch2[cols[e]]
                if arg < 0.0:
                    arg = 0.0
                i_ev[e] = _jf(np.sqrt(arg), jtab)
            for x in range(b0, b1):
                e = cn_eidx[x]
                r = _jinv(1.0 - i_ev[e], jtab)
                d2[e] = r * r
            for x in range(b0, b1):
                sc[rows[cn_eidx[x]]] = 0.0
            for x in range(b0, b1):
                e = cn_eidx[x]
                sc[rows[e]] += bw[e] * d2[e]
            for x in range(b0, b1):
                e = cn_eidx[x]
                arg = sc[rows[e]] - d2[e]
                if arg < 0.0:
                    arg = 0.0
                i_ec[e] = 1.0 - _jf(np.sqrt(arg), jtab)
            for x in range(a0, a1):
                sv[cols[vn_eidx[x]]] = 0.0
            for x in range(a0, a1):
                e = vn_eidx[x]
                r = _jinv(i_ec[e], jtab)
                u2[e] = r * r
                sv[cols[e]] += bw[e] * u2[e]
            for x in range(a0, a1):
                e = vn_eidx[x]
                j = cols[e]
                i_app[j] = _jf(np.sqrt(sv[j] + sigma_ch2[j]), jtab)
            total_sweeps += 1
            min_app = 2.0
            for j in range(n_cols):
                if i_app[j] < min_app:
                    min_app = i_app[j]
                    slowest = j
            if min_app >= 1.0 - eps:
                converged = True
                break
            if total_sweeps >= max_sweeps:
                break
        trace_out[s] = min_app
        stops_done = s + 1
        if not converged and (s + 1) % stops_per_pass == 0:
            delta = 0.0
            for j in range(n_cols):
                d = abs(i_app[j] - snapshot[j])
                if d > delta:
                    delta = d
                snapshot[j] = i_app[j]
            if delta < stall_tol:
                break
    return converged, total_sweeps, stops_done, slowest, min_app
