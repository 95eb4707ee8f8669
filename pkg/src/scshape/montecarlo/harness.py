"""BER/CER estimation harness with deterministic parallel frames.

Every frame's noise comes from an RNG keyed by (seed, SNR-point index,
frame index), frames are consumed in fixed-size rounds, and counts are
aggregated in frame order — so results are bit-identical for a given
(config, seed) regardless of scheduling.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..shaping import EnergyProfile
from .channel import simulate_channel
from .decoder import DecoderPlan, WindowConfig, build_plan, decode_windowed
from .lifting import LiftedCode

__all__ = ["StopRule", "SimResult", "run_point", "sweep_ber_cer"]


@dataclass(frozen=True)
class StopRule:
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    frames_per_task: int = 64


@dataclass
class SimResult:
    """Error-rate estimate at one average-SNR point."""

    gamma_avg_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    cer: float
    ci95: float
    runtime_s: float

    def to_dict(self) -> dict:
        return asdict(self)

    def counts(self) -> tuple:
        """The deterministic fields (everything but the wall-clock time)."""
        return (
            self.gamma_avg_db,
            self.frames,
            self.bit_errors,
            self.frame_errors,
            self.ber,
            self.cer,
            self.ci95,
        )


_WORKER: dict = {}


def _init_worker(code, profile, window, gamma_avg_db, seed, point_key):
    _WORKER["code"] = code
    _WORKER["profile"] = profile
    _WORKER["window"] = window
    _WORKER["plan"] = build_plan(code, window)
    _WORKER["gamma_avg_db"] = gamma_avg_db
    _WORKER["seed"] = seed
    _WORKER["point_key"] = point_key


def _run_frames(span) -> tuple[int, int, int]:
    lo, hi = span
    code: LiftedCode = _WORKER["code"]
    plan: DecoderPlan = _WORKER["plan"]
    bit_errs = 0
    frame_errs = 0
    for frame in range(lo, hi):
        rng = np.random.default_rng([_WORKER["seed"], _WORKER["point_key"], frame])
        chan = simulate_channel(code, _WORKER["profile"], _WORKER["gamma_avg_db"], rng)
        res = decode_windowed(code, chan, _WORKER["window"], plan=plan)
        errs = int(res.bits.sum())
        bit_errs += errs
        frame_errs += errs > 0
    return hi - lo, bit_errs, frame_errs


def run_point(
    code: LiftedCode,
    profile: EnergyProfile,
    gamma_avg_db: float,
    window: WindowConfig | None = None,
    stop: StopRule | None = None,
    seed: int = 0,
    jobs: int = 1,
    point_key: int = 0,
) -> SimResult:
    """Accumulate frames at one SNR point until the stop rule is met."""
    window = window or WindowConfig()
    stop = stop or StopRule()
    t0 = time.perf_counter()
    frames = bit_errors = frame_errors = 0
    next_frame = 0
    round_tasks = max(jobs, 1)

    def spans():
        nonlocal next_frame
        out = []
        for _ in range(round_tasks):
            if next_frame >= stop.max_frames:
                break
            hi = min(next_frame + stop.frames_per_task, stop.max_frames)
            out.append((next_frame, hi))
            next_frame = hi
        return out

    if jobs <= 1:
        _init_worker(code, profile, window, gamma_avg_db, seed, point_key)
        while frame_errors < stop.min_frame_errors and frames < stop.max_frames:
            batch = spans()
            if not batch:
                break
            for span in batch:
                nf, be, fe = _run_frames(span)
                frames += nf
                bit_errors += be
                frame_errors += fe
    else:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_worker,
            initargs=(code, profile, window, gamma_avg_db, seed, point_key),
        ) as pool:
            while frame_errors < stop.min_frame_errors and frames < stop.max_frames:
                batch = spans()
                if not batch:
                    break
                for nf, be, fe in pool.map(_run_frames, batch):
                    frames += nf
                    bit_errors += be
                    frame_errors += fe

    cer = frame_errors / frames if frames else 0.0
    ber = bit_errors / (frames * code.n) if frames else 0.0
    ci95 = 1.96 * np.sqrt(cer * (1.0 - cer) / frames) if frames else 0.0
    return SimResult(
        gamma_avg_db=float(gamma_avg_db),
        frames=frames,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        ber=ber,
        cer=cer,
        ci95=float(ci95),
        runtime_s=time.perf_counter() - t0,
    )


def sweep_ber_cer(
    code: LiftedCode,
    profile: EnergyProfile,
    snr_grid_db,
    window: WindowConfig | None = None,
    stop: StopRule | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> list[SimResult]:
    """BER/CER over an SNR grid; one SimResult per point."""
    grid = list(snr_grid_db)
    if not grid:
        raise ValueError("SNR grid must be non-empty")
    return [
        run_point(code, profile, g, window=window, stop=stop, seed=seed,
                  jobs=jobs, point_key=i)
        for i, g in enumerate(grid)
    ]
