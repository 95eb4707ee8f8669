"""Windowed sum-product decoding of a lifted tailbiting code.

The window spans ``span_vn_columns`` VN-type columns (times Q bits) and
slides by ``slide_vn_columns``, wrapping around tailbiting graphs for
``passes`` revolutions.  Only CNs with every neighbor inside the window
are updated; messages persist across slides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import ChannelRealization
from .lifting import LiftedCode

__all__ = ["WindowConfig", "DecoderPlan", "DecodeResult", "decode_windowed", "build_plan"]


@dataclass(frozen=True)
class WindowConfig:
    """Windowed-decoding geometry and iteration budget.

    The default span is 16 spatial positions (32 VN columns): a window of
    16 columns turns out to starve the decoding wave at desk-scale
    lifting factors, losing the shaped-vs-uniform gain the window is
    meant to preserve, so the wider reading of the window span is the
    default and the narrow one stays reachable through this config.
    ``early_exit`` stops a window's local iterations once every in-window
    parity check is satisfied; the iteration count is the cap either way.
    """

    span_vn_columns: int = 32
    slide_vn_columns: int = 2
    local_iterations: int = 50
    passes: int = 2
    llr_clip: float = 30.0
    early_exit: bool = True

    def __post_init__(self):
        if not self.span_vn_columns > self.slide_vn_columns >= 1:
            raise ValueError("window span must exceed slide, slide must be >= 1")
        if self.passes < 1 or self.local_iterations < 1:
            raise ValueError("passes and local iterations must be >= 1")


@dataclass
class DecoderPlan:
    """Precomputed decoding structure, reusable across frames."""

    indptr: np.ndarray
    indices: np.ndarray
    rows_concat: np.ndarray
    rows_off: np.ndarray
    bits_concat: np.ndarray
    bits_off: np.ndarray
    n_bits: int

    @property
    def n_stops(self) -> int:
        return len(self.rows_off) - 1


@dataclass
class DecodeResult:
    bits: np.ndarray
    posterior: np.ndarray
    window_min_llr: np.ndarray
    sweeps: int

    @property
    def decoded_zero(self) -> bool:
        return not self.bits.any()


def build_plan(code: LiftedCode, window: WindowConfig) -> DecoderPlan:
    """Per-stop active CN rows and window bits for the sliding schedule.

    A tailbiting base (square coupling band) wraps; otherwise the window
    slides once across the chain per pass.  A CN row is active only when
    every neighbor column lies inside the window.
    """
    base = code.base
    n_cols = base.n_vars
    q = code.q
    span = min(window.span_vn_columns, n_cols)
    wraps = base.n_checks == n_cols // 2  # square band: one CN row per position

    if wraps:
        starts_per_pass = list(range(0, n_cols, window.slide_vn_columns))
    else:
        starts_per_pass = list(range(0, max(n_cols - span, 0) + 1, window.slide_vn_columns))
    starts = starts_per_pass * window.passes

    col_of_row = [np.flatnonzero(base.b[k]) for k in range(base.n_checks)]
    row_chunks = []
    bit_chunks = []
    qr = np.arange(q, dtype=np.int64)
    for start in starts:
        if wraps:
            cols = (start + np.arange(span)) % n_cols
        else:
            cols = np.arange(start, min(start + span, n_cols))
        in_win = np.zeros(n_cols, dtype=bool)
        in_win[cols] = True
        active_types = [k for k in range(base.n_checks) if in_win[col_of_row[k]].all()]
        rows = (
            np.concatenate([k * q + qr for k in active_types])
            if active_types
            else np.zeros(0, dtype=np.int64)
        )
        bits = np.concatenate([c * q + qr for c in cols])
        row_chunks.append(rows)
        bit_chunks.append(bits)

    def concat(chunks):
        off = np.zeros(len(chunks) + 1, dtype=np.int64)
        off[1:] = np.cumsum([len(c) for c in chunks])
        return np.concatenate(chunks).astype(np.int64), off

    rows_concat, rows_off = concat(row_chunks)
    bits_concat, bits_off = concat(bit_chunks)
    return DecoderPlan(
        indptr=code.h.indptr.astype(np.int64),
        indices=code.h.indices.astype(np.int64),
        rows_concat=rows_concat,
        rows_off=rows_off,
        bits_concat=bits_concat,
        bits_off=bits_off,
        n_bits=code.n,
    )


def decode_windowed(
    code: LiftedCode,
    realization: ChannelRealization,
    window: WindowConfig | None = None,
    plan: DecoderPlan | None = None,
) -> DecodeResult:
    """Decode one frame; hard decisions from the final posteriors.

    Pass a precomputed ``plan`` when decoding many frames of the same
    code/window geometry.
    """
    window = window or WindowConfig()
    if plan is None:
        plan = build_plan(code, window)
    llr = np.ascontiguousarray(realization.llr, dtype=np.float64)
    if llr.shape != (plan.n_bits,):
        raise ValueError(f"LLR vector must have shape ({plan.n_bits},), got {llr.shape}")
    posterior = np.empty(plan.n_bits)
    trace = np.empty(plan.n_stops)
    sweeps = _kernels.windowed_bp(
        plan.indptr,
        plan.indices,
        llr,
        plan.rows_concat,
        plan.rows_off,
        plan.bits_concat,
        plan.bits_off,
        window.local_iterations,
        window.llr_clip,
        window.early_exit,
        posterior,
        trace,
    )
    bits = (posterior < 0.0).astype(np.uint8)
    return DecodeResult(bits=bits, posterior=posterior, window_min_llr=trace, sweeps=int(sweeps))
