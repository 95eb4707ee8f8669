"""Independent oracles for the numerical tests.

Everything here deliberately avoids the package's computational paths:
Monte Carlo sampling instead of quadrature, direct transcription instead
of the band constructors, dense flooding BP instead of the windowed
kernel, GF(2) elimination instead of sparse algebra.
"""

from __future__ import annotations

import numpy as np


def mi_sample_oracle(sigma: float, n_samples: int = 4_000_000, seed: int = 12345) -> float:
    """MC estimate of 1 - E[log2(1 + e^-L)], L ~ N(sigma^2/2, sigma^2).

    Antithetic pairs halve the variance; standard error is roughly
    0.5/sqrt(n) for mid-range sigma.
    """
    rng = np.random.default_rng(seed)
    mu = 0.5 * sigma * sigma
    total = 0.0
    chunk = 500_000
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        z = rng.standard_normal(m)
        lp = mu + sigma * z
        lm = mu - sigma * z
        total += 0.5 * (np.log1p(np.exp(-lp)) + np.log1p(np.exp(-lm))).sum()
        done += m
    return 1.0 - total / (n_samples * np.log(2.0))


def capacity_sample_oracle(gamma: float, rate: float, n_samples: int = 4_000_000,
                           seed: int = 999) -> float:
    """MC bi-AWGN capacity at linear Eb/N0 via the channel LLR."""
    return mi_sample_oracle(np.sqrt(8.0 * rate * gamma), n_samples, seed)


def tailbiting_direct(dv: int, n_types: int) -> np.ndarray:
    """Tailbiting base matrix by rolling an explicit first block row.

    Independent of the library's per-entry construction: the first block
    row places B0 at block column 0 and the last dv - 1 block columns;
    every other row is its cyclic shift.
    """
    m = n_types // 2
    first = np.zeros(m, dtype=np.int64)
    first[0] = 1
    for t in range(1, dv):
        first[m - t] = 1
    rows = [np.roll(first, k) for k in range(m)]
    return np.repeat(np.vstack(rows), 2, axis=1)


def terminated_direct(dv: int, n_types: int) -> np.ndarray:
    """Terminated base matrix from the column side: position c is checked
    by rows c..c+dv-1."""
    length = n_types // 2
    b = np.zeros((length + dv - 1, n_types), dtype=np.int64)
    for c in range(length):
        for r in range(c, c + dv):
            b[r, 2 * c] = 1
            b[r, 2 * c + 1] = 1
    return b


def flooding_bp_reference(h, llr: np.ndarray, iterations: int = 200,
                          clip: float = 30.0) -> np.ndarray:
    """Plain full-graph flooding sum-product decoder (dense per-row loops)."""
    indptr, indices = h.indptr, h.indices
    n_rows = h.shape[0]
    c2v = np.zeros(h.nnz)
    post = llr.astype(float).copy()
    lim = 0.9999999999999998
    for _ in range(iterations):
        tt = np.empty(h.nnz)
        for r in range(n_rows):
            sl = slice(indptr[r], indptr[r + 1])
            v2c = np.clip(post[indices[sl]] - c2v[sl], -clip, clip)
            tt[sl] = np.tanh(0.5 * v2c)
        for r in range(n_rows):
            sl = slice(indptr[r], indptr[r + 1])
            t = tt[sl]
            fwd = np.concatenate(([1.0], np.cumprod(t[:-1])))
            bwd = np.concatenate((np.cumprod(t[::-1])[-2::-1], [1.0]))
            ext = np.clip(fwd * bwd, -lim, lim)
            new = np.clip(2.0 * np.arctanh(ext), -clip, clip)
            post[indices[sl]] += new - c2v[sl]
            c2v[sl] = new
        hard = (post < 0).astype(np.int8)
        if not (h @ hard % 2).any():
            break
    return (post < 0).astype(np.uint8)


def gf2_nullspace(h_dense: np.ndarray) -> np.ndarray:
    """Basis of the GF(2) null space of a dense binary matrix."""
    a = (h_dense % 2).astype(np.uint8).copy()
    m, n = a.shape
    pivots = []
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, m):
            if a[r, col]:
                sel = r
                break
        if sel is None:
            continue
        a[[row, sel]] = a[[sel, row]]
        for r in range(m):
            if r != row and a[r, col]:
                a[r] ^= a[row]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = np.zeros(n, dtype=np.uint8)
        v[fc] = 1
        for r, pc in enumerate(pivots):
            if a[r, fc]:
                v[pc] = 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8) if basis else np.zeros((0, n), dtype=np.uint8)
