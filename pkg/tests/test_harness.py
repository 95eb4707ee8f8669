import numpy as np
import pytest

from scshape.montecarlo.harness import StopRule, run_point, sweep_ber_cer
from scshape.montecarlo.decoder import WindowConfig
from scshape.montecarlo.lifting import lift
from scshape.protograph import build_tailbiting
from scshape.shaping import ShapingParams, two_level_profile


@pytest.fixture(scope="module")
def setup():
    code = lift(build_tailbiting(3, 24), 8, seed=3)
    prof = two_level_profile(ShapingParams(1.5, 0.25), 24)
    window = WindowConfig(span_vn_columns=12, slide_vn_columns=2)
    return code, prof, window


def test_deterministic_across_runs(setup):
    code, prof, window = setup
    stop = StopRule(min_frame_errors=5, max_frames=60, frames_per_task=10)
    a = run_point(code, prof, 1.0, window=window, stop=stop, seed=3, jobs=1)
    b = run_point(code, prof, 1.0, window=window, stop=stop, seed=3, jobs=1)
    assert a.counts() == b.counts()


def test_deterministic_across_jobs(setup):
    # Completion order must not leak into the counts.
    code, prof, window = setup
    stop = StopRule(min_frame_errors=5, max_frames=60, frames_per_task=10)
    a = run_point(code, prof, 1.0, window=window, stop=stop, seed=3, jobs=1)
    b = run_point(code, prof, 1.0, window=window, stop=stop, seed=3, jobs=2)
    assert a.counts() == b.counts()


def test_seed_changes_counts(setup):
    code, prof, window = setup
    stop = StopRule(min_frame_errors=5, max_frames=60, frames_per_task=10)
    a = run_point(code, prof, 1.0, window=window, stop=stop, seed=3, jobs=1)
    b = run_point(code, prof, 1.0, window=window, stop=stop, seed=4, jobs=1)
    assert a.counts() != b.counts()


def test_stop_rules(setup):
    code, prof, window = setup
    capped = run_point(
        code, prof, 0.0,
        window=window,
        stop=StopRule(min_frame_errors=10_000, max_frames=30, frames_per_task=10),
        seed=0, jobs=1,
    )
    assert capped.frames == 30
    early = run_point(
        code, prof, 0.0,
        window=window,
        stop=StopRule(min_frame_errors=1, max_frames=10_000, frames_per_task=5),
        seed=0, jobs=1,
    )
    assert early.frame_errors >= 1
    assert early.frames < 10_000


def test_error_accounting(setup):
    code, prof, window = setup
    stop = StopRule(min_frame_errors=10, max_frames=100, frames_per_task=20)
    res = run_point(code, prof, 0.5, window=window, stop=stop, seed=1, jobs=1)
    assert res.frame_errors >= 1
    assert res.bit_errors >= res.frame_errors  # an errored frame has >= 1 bit error
    assert res.ber <= res.cer
    assert res.cer == pytest.approx(res.frame_errors / res.frames)
    assert 0 < res.ci95 < 1


def test_sweep_monotone_cer(setup):
    code, prof, window = setup
    stop = StopRule(min_frame_errors=15, max_frames=120, frames_per_task=20)
    points = sweep_ber_cer(code, prof, [0.0, 4.0], window=window, stop=stop, seed=2, jobs=1)
    assert len(points) == 2
    assert points[0].cer >= points[1].cer - points[0].ci95 - points[1].ci95


def test_empty_grid_rejected(setup):
    code, prof, window = setup
    with pytest.raises(ValueError):
        sweep_ber_cer(code, prof, [], window=window)
