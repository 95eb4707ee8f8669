"""EXIT recursion over parallel bi-AWGN channels and convergence detection.

``exit_sweep`` is the reference, matrix-shaped implementation of one
synchronous iteration; ``converges`` runs full schedules through the
compiled kernels (same recursion on an edge list).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..protograph import BaseMatrix
from ..shaping import ShapingParams, snr_split
from . import _kernels
from .jfunction import JFunction, default_j

__all__ = [
    "Schedule",
    "ExitState",
    "ConvergenceResult",
    "channel_sigma",
    "build_snr_vector",
    "snr_vector_from_pair",
    "exit_sweep",
    "converges",
]

DEFAULT_EPSILON = 1e-6
DEFAULT_MAX_ITERS = 50_000
# Sup-norm APP change below which the recursion is declared stalled; a
# moving decoding wave sits orders of magnitude above this.
DEFAULT_STALL_TOL = 1e-13


@dataclass(frozen=True)
class Schedule:
    """Message-passing schedule for the EXIT analysis.

    ``window_positions`` counts spatial positions (2 VN types each);
    ``passes`` is the wrap count around a tailbiting graph.  The default
    16-position window keeps windowed thresholds within a few hundredths
    of a dB of flooding; an 8-position window starves the decoding wave
    (only W - dv + 1 check positions are ever active) and loses more
    than a dB on the shaped boundary.
    """

    kind: str = "flooding"  # "flooding" | "windowed"
    window_positions: int = 16
    local_iterations: int = 50
    slide_positions: int = 1
    passes: int = 2

    def __post_init__(self):
        if self.kind not in ("flooding", "windowed"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "windowed":
            if self.window_positions < 1 or self.slide_positions < 1:
                raise ValueError("window span and slide must be positive")
            if self.passes < 1:
                raise ValueError("passes must be >= 1")

    @classmethod
    def flooding(cls) -> Schedule:
        return cls(kind="flooding")

    @classmethod
    def windowed(cls, window_positions: int = 8, local_iterations: int = 50,
                 slide_positions: int = 1, passes: int = 2) -> Schedule:
        return cls(
            kind="windowed",
            window_positions=window_positions,
            local_iterations=local_iterations,
            slide_positions=slide_positions,
            passes=passes,
        )


def channel_sigma(gamma_j, rate: float):
    """Std dev of the channel LLR at linear per-type Eb/N0 ``gamma_j``.

    With sigma^2 = 1/(2*R*gamma_avg) and gamma_j = gamma_avg*f_j, the LLR
    variance 4*f_j/sigma^2 gives sigma_ch = sqrt(8*R*gamma_j).
    """
    gamma_j = np.asarray(gamma_j, dtype=float)
    if np.any(gamma_j <= 0):
        raise ValueError("per-type SNR must be positive")
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    out = np.sqrt(8.0 * rate * gamma_j)
    return float(out) if out.ndim == 0 else out


def build_snr_vector(gamma_avg: float, params: ShapingParams, n_types: int,
                     boost_offset_positions: int = 0) -> np.ndarray:
    """Per-VN-type linear SNR vector for two-level shaping.

    Types [0, lam*N) get gamma1, the rest gamma2; ``boost_offset_positions``
    rotates the boosted segment by whole spatial positions (2 types each).
    """
    pt = snr_split(gamma_avg, params)
    return snr_vector_from_pair(pt.gamma1, pt.gamma2, params.lam, n_types,
                                boost_offset_positions)


def snr_vector_from_pair(gamma1: float, gamma2: float, lam: float, n_types: int,
                         boost_offset_positions: int = 0) -> np.ndarray:
    ell_exact = lam * n_types
    ell = int(round(ell_exact))
    if abs(ell_exact - ell) > 1e-9:
        raise ValueError(f"lam * N must be an integer, got {lam} * {n_types}")
    gam = np.full(n_types, float(gamma2))
    if ell:
        idx = (np.arange(ell) + 2 * boost_offset_positions) % n_types
        gam[idx] = float(gamma1)
    return gam


@dataclass
class ExitState:
    """Per-edge mutual-information matrices plus the per-type APP vector.

    Entries are pinned to exactly 0 wherever the base matrix is 0.
    """

    i_ev: np.ndarray
    i_ec: np.ndarray
    i_app: np.ndarray
    iteration: int = 0

    @classmethod
    def initial(cls, matrix: BaseMatrix) -> ExitState:
        m, n = matrix.b.shape
        return cls(
            i_ev=np.zeros((m, n)),
            i_ec=np.zeros((m, n)),
            i_app=np.zeros(n),
            iteration=0,
        )


def exit_sweep(
    matrix: BaseMatrix,
    gammas: np.ndarray,
    state: ExitState,
    rate: float | None = None,
    jfunc: JFunction | None = None,
) -> ExitState:
    """One synchronous EXIT iteration (VN update, CN update, APP update).

    Reference implementation on dense (M, N) arrays; repeated edges are
    counted through the multiplicity b[k, j] with a single self-edge
    excluded from the extrinsic sums.
    """
    jf = jfunc or default_j()
    b = matrix.b
    gammas = np.asarray(gammas, dtype=float)
    if gammas.shape != (matrix.n_vars,):
        raise ValueError(f"SNR vector must have shape ({matrix.n_vars},), got {gammas.shape}")
    if state.i_ev.shape != b.shape or state.i_ec.shape != b.shape:
        raise ValueError("state dimensions do not match the base matrix")
    rate = matrix.rate if rate is None else rate
    mask = b > 0
    sig2 = channel_sigma(gammas, rate) ** 2

    u2 = np.where(mask, jf.inverse(state.i_ec), 0.0) ** 2
    sv = (b * u2).sum(axis=0)
    arg_v = np.maximum(sv[None, :] - u2 + sig2[None, :], 0.0)
    i_ev = np.where(mask, jf.forward(np.sqrt(arg_v)), 0.0)

    d2 = np.where(mask, jf.inverse(np.where(mask, 1.0 - i_ev, 0.0)), 0.0) ** 2
    sc = (b * d2).sum(axis=1)
    arg_c = np.maximum(sc[:, None] - d2, 0.0)
    i_ec = np.where(mask, 1.0 - jf.forward(np.sqrt(arg_c)), 0.0)

    u2_new = np.where(mask, jf.inverse(i_ec), 0.0) ** 2
    i_app = jf.forward(np.sqrt((b * u2_new).sum(axis=0) + sig2))

    return ExitState(i_ev=i_ev, i_ec=i_ec, i_app=i_app, iteration=state.iteration + 1)


@dataclass
class ConvergenceResult:
    converged: bool
    iterations: int
    min_iapp: float
    slowest_type: int
    trace: np.ndarray = field(repr=False)

    def __bool__(self) -> bool:
        return self.converged


def _edge_list(matrix: BaseMatrix):
    rows, cols = np.nonzero(matrix.b)
    bw = matrix.b[rows, cols].astype(np.float64)
    return rows.astype(np.int64), cols.astype(np.int64), bw


def _infer_dv(matrix: BaseMatrix) -> int:
    return int(matrix.vn_degrees.max())


def _window_stops(matrix: BaseMatrix, schedule: Schedule):
    """Per-stop active-edge index lists (VN side and CN side), concatenated.

    A window covers ``window_positions`` consecutive positions (wrapping
    for tailbiting geometries, i.e. square M x 2M matrices); a CN row is
    active only when every neighbor column lies inside the window.
    """
    m, n = matrix.b.shape
    n_pos = n // 2
    wraps = m == n_pos  # tailbiting band is square; terminated has extra rows
    w = min(schedule.window_positions, n_pos)
    slide = schedule.slide_positions

    rows, cols, _ = _edge_list(matrix)
    col_pos = cols // 2

    if wraps:
        starts_per_pass = range(0, n_pos, slide)
    else:
        starts_per_pass = range(0, max(n_pos - w, 0) + 1, slide)
    starts = [s for _ in range(schedule.passes) for s in starts_per_pass]

    vn_chunks, cn_chunks = [], []
    for start in starts:
        if wraps:
            active_pos = (np.arange(w) + start) % n_pos
        else:
            active_pos = np.arange(start, min(start + w, n_pos))
        pos_mask = np.zeros(n_pos, dtype=bool)
        pos_mask[active_pos] = True
        edge_vn_active = pos_mask[col_pos]
        # CN rows whose neighbors all sit inside the window.
        bad_rows = np.unique(rows[~edge_vn_active])
        row_ok = np.ones(m, dtype=bool)
        row_ok[bad_rows] = False
        vn_chunks.append(np.flatnonzero(edge_vn_active))
        cn_chunks.append(np.flatnonzero(row_ok[rows]))

    def concat(chunks):
        off = np.zeros(len(chunks) + 1, dtype=np.int64)
        off[1:] = np.cumsum([len(c) for c in chunks])
        eidx = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
        return eidx.astype(np.int64), off

    vn_eidx, vn_off = concat(vn_chunks)
    cn_eidx, cn_off = concat(cn_chunks)
    stops_per_pass = len(starts) // schedule.passes
    return vn_eidx, vn_off, cn_eidx, cn_off, stops_per_pass


def converges(
    matrix: BaseMatrix,
    gammas: np.ndarray,
    schedule: Schedule | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    epsilon: float = DEFAULT_EPSILON,
    rate: float | None = None,
    stall_tol: float = DEFAULT_STALL_TOL,
    jfunc: JFunction | None = None,
) -> ConvergenceResult:
    """Whether min_j I_app reaches 1 - epsilon within the iteration budget.

    The trace holds the minimum APP mutual information per iteration
    (per window stop for the windowed schedule); ``slowest_type`` is the
    VN type attaining the final minimum — the wave-front diagnostic.
    """
    if not 0.0 < epsilon < 0.1:
        raise ValueError(f"epsilon must be in (0, 0.1), got {epsilon}")
    schedule = schedule or Schedule.flooding()
    gammas = np.ascontiguousarray(gammas, dtype=float)
    if gammas.shape != (matrix.n_vars,):
        raise ValueError(f"SNR vector must have shape ({matrix.n_vars},), got {gammas.shape}")
    rate = matrix.rate if rate is None else rate
    jf = jfunc or default_j()
    jtab = jf.table_arrays()
    sig2 = channel_sigma(gammas, rate) ** 2
    rows, cols, bw = _edge_list(matrix)

    if schedule.kind == "flooding":
        trace = np.empty(max_iters)
        converged, its, slowest, min_app = _kernels.flooding_converge(
            rows, cols, bw, matrix.n_checks, matrix.n_vars, sig2,
            epsilon, max_iters, stall_tol,
            jtab,
            trace,
        )
        return ConvergenceResult(
            converged=bool(converged),
            iterations=int(its),
            min_iapp=float(min_app),
            slowest_type=int(slowest),
            trace=trace[:its].copy(),
        )

    dv = _infer_dv(matrix)
    if schedule.window_positions < dv:
        raise ValueError(
            f"window span {schedule.window_positions} positions is below dv = {dv}"
        )
    vn_eidx, vn_off, cn_eidx, cn_off, stops_per_pass = _window_stops(matrix, schedule)
    n_stops = len(vn_off) - 1
    trace = np.empty(n_stops)
    converged, sweeps, stops_done, slowest, min_app = _kernels.windowed_converge(
        rows, cols, bw, matrix.n_checks, matrix.n_vars, sig2,
        vn_eidx, vn_off, cn_eidx, cn_off, stops_per_pass,
        schedule.local_iterations, epsilon, max_iters, stall_tol,
        jtab,
        trace,
    )
    return ConvergenceResult(
        converged=bool(converged),
        iterations=int(sweeps),
        min_iapp=float(min_app),
        slowest_type=int(slowest),
        trace=trace[:stops_done].copy(),
    )
