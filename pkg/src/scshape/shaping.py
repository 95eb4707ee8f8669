"""Two-level energy shaping arithmetic and shaped bi-AWGN capacity.

Transmission uses two energy factors f1 = phi * f2 (phi >= 1): the first
fraction ``lam`` of the codeword is boosted, the rest attenuated so that
the mean energy stays 1.  All SNRs are Eb/N0; internal arithmetic is in
linear scale, user-facing values in dB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ShapingParams",
    "SnrPoint",
    "EnergyProfile",
    "db_to_linear",
    "linear_to_db",
    "snr_split",
    "two_level_profile",
    "llr_mutual_information",
    "biawgn_capacity",
    "shaped_capacity",
    "rate_limit_snr",
]

# Mean-energy / SNR-composition identities are exact up to this tolerance.
IDENTITY_TOL = 1e-12


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ShapingParams:
    """Boosting factor phi >= 1 and normalized boosting length lam in [0, 1].

    phi == 1, lam == 0 or lam == 1 all degenerate to uniform energy.
    """

    phi: float
    lam: float

    def __post_init__(self):
        if not self.phi >= 1.0:
            raise ValueError(f"boosting factor must be >= 1, got {self.phi}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"normalized boosting length must be in [0, 1], got {self.lam}")

    @property
    def is_uniform(self) -> bool:
        return self.phi == 1.0 or self.lam in (0.0, 1.0)


@dataclass(frozen=True)
class SnrPoint:
    """Average SNR split into per-segment SNRs (all linear Eb/N0).

    Satisfies lam*f1 + (1-lam)*f2 = 1, gamma_avg = lam*gamma1 + (1-lam)*gamma2
    and gamma1/gamma2 = phi.
    """

    gamma_avg: float
    gamma1: float
    gamma2: float
    f1: float
    f2: float

    @property
    def gamma_avg_db(self) -> float:
        return float(linear_to_db(self.gamma_avg))

    @property
    def gamma1_db(self) -> float:
        return float(linear_to_db(self.gamma1))

    @property
    def gamma2_db(self) -> float:
        return float(linear_to_db(self.gamma2))


@dataclass(frozen=True)
class EnergyProfile:
    """Per-VN-type energy factors with mean exactly 1."""

    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        object.__setattr__(self, "f", f)
        if np.any(f <= 0):
            raise ValueError("energy factors must be positive")
        if abs(f.mean() - 1.0) > IDENTITY_TOL:
            raise ValueError(f"energy factors must average to 1, got mean {f.mean()!r}")

    def __len__(self) -> int:
        return len(self.f)


def snr_split(gamma_avg: float, params: ShapingParams) -> SnrPoint:
    """Split an average SNR into the boosted/unboosted segment SNRs.

    gamma1 = phi*gamma/(lam*phi + 1 - lam), gamma2 = gamma/(lam*phi + 1 - lam).
    """
    if not gamma_avg > 0:
        raise ValueError(f"average SNR must be positive, got {gamma_avg}")
    denom = params.lam * params.phi + (1.0 - params.lam)
    f2 = 1.0 / denom
    f1 = params.phi * f2
    return SnrPoint(
        gamma_avg=gamma_avg,
        gamma1=gamma_avg * f1,
        gamma2=gamma_avg * f2,
        f1=f1,
        f2=f2,
    )


def two_level_profile(params: ShapingParams, n_types: int) -> EnergyProfile:
    """Energy profile over ``n_types`` VN types: first lam*N boosted.

    lam * n_types must be an integer; fractional boost lengths are rejected
    rather than rounded.
    """
    ell_exact = params.lam * n_types
    ell = int(round(ell_exact))
    if abs(ell_exact - ell) > 1e-9:
        raise ValueError(
            f"lam * N must be an integer number of VN types; got {params.lam} * {n_types} = {ell_exact}"
        )
    point = snr_split(1.0, params)  # only f1/f2 needed
    f = np.full(n_types, point.f2)
    f[:ell] = point.f1
    # Exact renormalization guards the mean-1 invariant against rounding.
    f /= f.mean()
    return EnergyProfile(f=f)


_GH_NODES = {}


def _gauss_hermite(n: int):
    # Probabilist-normalized nodes for E[g(Z)], Z ~ N(0, 1).
    if n not in _GH_NODES:
        t, w = np.polynomial.hermite.hermgauss(n)
        _GH_NODES[n] = (t * np.sqrt(2.0), w / np.sqrt(np.pi))
    return _GH_NODES[n]


def llr_mutual_information(sigma, nodes: int = 64):
    """MI between a bit and its consistent-Gaussian LLR of std dev ``sigma``.

    The LLR is N(sigma^2/2, sigma^2); the MI is
    1 - E[log2(1 + exp(-L))], evaluated by Gauss-Hermite quadrature.
    Vectorized over sigma.
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise ValueError("sigma must be nonnegative")
    z, w = _gauss_hermite(nodes)
    s = sigma[..., None]
    arg = -(0.5 * s * s + s * z)
    # log2(1 + e^arg) via log1p; arg <= 0 has no overflow risk, large
    # positive arg (sigma ~ 0 side) is bounded by |arg| <= s*max|z|.
    integrand = np.log1p(np.exp(arg)) / np.log(2.0)
    out = 1.0 - integrand @ w
    return np.clip(out, 0.0, 1.0) if out.ndim else float(np.clip(out, 0.0, 1.0))


def biawgn_capacity(gamma: float, rate_for_ebn0: float, nodes: int = 64) -> float:
    """Capacity (bits/use) of the bi-AWGN channel at linear Eb/N0 ``gamma``.

    ``rate_for_ebn0`` converts Eb/N0 to noise variance via
    sigma^2 = 1/(2*R*gamma); the channel LLR then has std dev
    sqrt(8*R*gamma).
    """
    if not gamma > 0:
        raise ValueError(f"SNR must be positive, got {gamma}")
    if not 0.0 < rate_for_ebn0 < 1.0:
        raise ValueError(f"rate must be in (0, 1), got {rate_for_ebn0}")
    return float(llr_mutual_information(np.sqrt(8.0 * rate_for_ebn0 * gamma), nodes=nodes))


def shaped_capacity(gamma_avg: float, params: ShapingParams, rate: float, nodes: int = 64) -> float:
    """Two-level shaped capacity lam*C(gamma1) + (1-lam)*C(gamma2)."""
    pt = snr_split(gamma_avg, params)
    c1 = biawgn_capacity(pt.gamma1, rate, nodes=nodes)
    c2 = biawgn_capacity(pt.gamma2, rate, nodes=nodes)
    return params.lam * c1 + (1.0 - params.lam) * c2


def rate_limit_snr(
    rate: float,
    params: ShapingParams,
    tol_db: float = 0.001,
    lo_db: float = -10.0,
    hi_db: float = 15.0,
) -> float:
    """Smallest linear average SNR with shaped capacity >= ``rate``.

    Bisection on the dB axis to ``tol_db``; raises if the bracket does not
    straddle the target.
    """
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must be in (0, 1), got {rate}")

    def gap(g_db):
        return shaped_capacity(float(db_to_linear(g_db)), params, rate) - rate

    if gap(lo_db) >= 0:
        raise ValueError(f"lower bracket {lo_db} dB already achieves rate {rate}")
    if gap(hi_db) < 0:
        raise ValueError(f"upper bracket {hi_db} dB does not achieve rate {rate}")
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return float(db_to_linear(hi))
