"""J-function: MI of a consistent-Gaussian LLR versus its std dev.

Realized as a quadrature-built lookup table on a uniform sigma grid with
monotone cubic (PCHIP) interpolation; the inverse solves the cubic on the
bracketing segment.  Round-trip accuracy target: 1e-6 over
I in [1e-6, 1 - 1e-6].
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..shaping import llr_mutual_information

__all__ = ["JFunction", "default_j", "j_function", "j_inverse"]

# Above this sigma, 1 - J(sigma) approaches double resolution near 1.0 and
# the tabulated values stop increasing strictly; the table ends here and the
# forward map saturates to exactly 1 (1 - J(14) ~ 6e-12, far beyond any
# convergence target used by the analysis).
SIGMA_MAX = 14.0
TABLE_POINTS = 4096


class JFunction:
    """Tabulated forward map sigma -> I and its inverse."""

    def __init__(self, sigma_max: float = SIGMA_MAX, points: int = TABLE_POINTS, nodes: int = 96):
        self.sigma_max = float(sigma_max)
        self.points = int(points)
        self.sigma_grid = np.linspace(0.0, self.sigma_max, self.points)
        self.dx = self.sigma_grid[1] - self.sigma_grid[0]
        self.values = llr_mutual_information(self.sigma_grid, nodes=nodes)
        self.values[0] = 0.0
        if np.any(np.diff(self.values) <= 0):
            raise RuntimeError("J table is not strictly increasing; reduce sigma_max")
        pchip = PchipInterpolator(self.sigma_grid, self.values, extrapolate=False)
        # PPoly layout: segment i evaluates ((c3*t + c2)*t + c1)*t + c0,
        # t = sigma - grid[i].
        self.c3 = np.ascontiguousarray(pchip.c[0])
        self.c2 = np.ascontiguousarray(pchip.c[1])
        self.c1 = np.ascontiguousarray(pchip.c[2])
        self.c0 = np.ascontiguousarray(pchip.c[3])
        # Per-MI-bucket segment brackets so the inverse's binary search
        # starts essentially resolved for mid-range inputs.
        n_buckets = 8192
        self.inv_scale = float(n_buckets)
        edges = np.arange(n_buckets + 2) / n_buckets
        self.inv_index = np.clip(
            np.searchsorted(self.values, edges, side="right") - 1, 0, self.points - 2
        ).astype(np.int64)

    @property
    def resolution(self) -> float:
        return float(self.dx)

    def forward(self, sigma):
        """J(sigma), vectorized; saturates to 1 beyond the tabulated range."""
        sigma = np.asarray(sigma, dtype=float)
        scalar = sigma.ndim == 0
        s = np.atleast_1d(sigma)
        if np.any(s < 0):
            raise ValueError("sigma must be nonnegative")
        idx = np.clip((s / self.dx).astype(np.int64), 0, self.points - 2)
        t = s - self.sigma_grid[idx]
        out = ((self.c3[idx] * t + self.c2[idx]) * t + self.c1[idx]) * t + self.c0[idx]
        out = np.where(s >= self.sigma_max, 1.0, out)
        np.clip(out, 0.0, 1.0, out=out)
        return float(out[0]) if scalar else out

    def inverse(self, mi):
        """J^{-1}(I), vectorized; clamps to [0, sigma_max]."""
        mi = np.asarray(mi, dtype=float)
        scalar = mi.ndim == 0
        y = np.atleast_1d(mi).astype(float)
        idx = np.clip(np.searchsorted(self.values, y, side="right") - 1, 0, self.points - 2)
        y0 = self.values[idx]
        y1 = self.values[idx + 1]
        # Linear seed, then safeguarded Newton on the segment cubic.
        t = np.clip((y - y0) / (y1 - y0) * self.dx, 0.0, self.dx)
        c3, c2, c1, c0 = self.c3[idx], self.c2[idx], self.c1[idx], self.c0[idx]
        for _ in range(4):
            f = ((c3 * t + c2) * t + c1) * t + c0 - y
            df = (3.0 * c3 * t + 2.0 * c2) * t + c1
            step = f / np.where(df > 0, df, 1.0)
            t = np.clip(t - step, 0.0, self.dx)
        out = self.sigma_grid[idx] + t
        out = np.where(y <= 0.0, 0.0, out)
        out = np.where(y >= self.values[-1], self.sigma_max, out)
        return float(out[0]) if scalar else out

    def table_arrays(self):
        """Table bundle consumed by the compiled kernels."""
        return (
            self.sigma_grid,
            float(self.dx),
            self.values,
            self.c3,
            self.c2,
            self.c1,
            self.c0,
            float(self.sigma_max),
            self.inv_index,
            self.inv_scale,
        )


_DEFAULT: JFunction | None = None


def default_j() -> JFunction:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = JFunction()
    return _DEFAULT


def j_function(sigma):
    """MI of a consistent-Gaussian LLR with variance sigma^2, mean sigma^2/2."""
    return default_j().forward(sigma)


def j_inverse(mi):
    return default_j().inverse(mi)
