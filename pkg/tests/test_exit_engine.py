import numpy as np
import pytest

from scshape.pexit.engine import (
    ExitState,
    Schedule,
    build_snr_vector,
    channel_sigma,
    converges,
    exit_sweep,
    snr_vector_from_pair,
)
from scshape.pexit.jfunction import j_function
from scshape.protograph import build_tailbiting, build_uncoupled
from scshape.shaping import ShapingParams, db_to_linear


class TestChannelSigma:
    def test_unit_snr_half_rate(self):
        assert channel_sigma(1.0, 0.5) == pytest.approx(2.0, rel=1e-15)

    def test_vanishing_snr(self):
        assert channel_sigma(1e-12, 0.5) < 1e-5

    def test_linear_in_energy(self):
        # Doubling the per-type SNR doubles the LLR variance.
        a = channel_sigma(0.7, 0.5)
        b = channel_sigma(1.4, 0.5)
        assert b**2 == pytest.approx(2 * a**2, rel=1e-12)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            channel_sigma(-1.0, 0.5)
        with pytest.raises(ValueError):
            channel_sigma(1.0, 1.5)


class TestSnrVector:
    def test_two_level_layout(self):
        gam = build_snr_vector(1.0, ShapingParams(2.0, 0.25), 16)
        pt_g1 = gam[0]
        assert (gam[:4] == pt_g1).all()
        assert (gam[4:] == gam[-1]).all()
        assert pt_g1 > gam[-1]

    def test_rotation(self):
        gam = snr_vector_from_pair(2.0, 1.0, 0.25, 16, boost_offset_positions=2)
        assert (gam[4:8] == 2.0).all()
        assert gam[:4].sum() == pytest.approx(4.0)

    def test_non_integer_rejected(self):
        with pytest.raises(ValueError):
            snr_vector_from_pair(2.0, 1.0, 1 / 3, 16)


class TestExitSweep:
    def test_first_iteration_is_channel_only(self):
        m = build_tailbiting(3, 12)
        gam = np.full(12, float(db_to_linear(1.0)))
        state = exit_sweep(m, gam, ExitState.initial(m))
        expect = j_function(channel_sigma(gam[0], m.rate))
        mask = m.b > 0
        assert state.i_ev[mask] == pytest.approx(expect, rel=1e-12)
        assert (state.i_ev[~mask] == 0).all()

    def test_all_ones_fixed_point(self):
        m = build_uncoupled(3)
        gam = np.full(2, 2.0)
        state = ExitState.initial(m)
        state.i_ec[:] = np.where(m.b > 0, 1.0, 0.0)
        state.i_ev[:] = np.where(m.b > 0, 1.0, 0.0)
        out = exit_sweep(m, gam, state)
        assert (out.i_ev[m.b > 0] == 1.0).all()
        assert (out.i_ec[m.b > 0] == 1.0).all()
        assert (out.i_app == 1.0).all()

    def test_zero_pattern_preserved(self):
        m = build_tailbiting(4, 24)
        gam = np.full(24, 1.2)
        state = ExitState.initial(m)
        for _ in range(5):
            state = exit_sweep(m, gam, state)
            assert (state.i_ev[m.b == 0] == 0).all()
            assert (state.i_ec[m.b == 0] == 0).all()
            assert (state.i_ev >= 0).all() and (state.i_ev <= 1).all()
            assert (state.i_ec >= 0).all() and (state.i_ec <= 1).all()

    def test_min_app_monotone(self):
        m = build_tailbiting(3, 16)
        gam = np.full(16, float(db_to_linear(1.5)))
        state = ExitState.initial(m)
        prev = 0.0
        for _ in range(40):
            state = exit_sweep(m, gam, state)
            cur = state.i_app.min()
            assert cur >= prev - 1e-12
            prev = cur

    def test_dimension_mismatch(self):
        m = build_tailbiting(3, 16)
        with pytest.raises(ValueError):
            exit_sweep(m, np.ones(8), ExitState.initial(m))


class TestConverges:
    def test_uncoupled_3_6_bracket(self):
        # Brackets the (3,6) threshold near 1.1 dB.
        m = build_uncoupled(3)
        hi = converges(m, np.full(2, float(db_to_linear(1.2))), max_iters=2000)
        lo = converges(m, np.full(2, float(db_to_linear(1.0))), max_iters=2000)
        assert hi.converged and hi.iterations <= 2000
        assert not lo.converged
        assert lo.min_iapp < 1 - 1e-6

    def test_huge_snr_fast(self):
        m = build_tailbiting(5, 64)
        res = converges(m, np.full(64, float(db_to_linear(10.0))))
        assert res.converged and res.iterations < 50

    def test_kernel_matches_reference_sweeps(self):
        # The compiled trajectory must match the matrix-shaped reference.
        m = build_tailbiting(3, 16)
        gam = build_snr_vector(float(db_to_linear(1.6)), ShapingParams(1.5, 0.25), 16)
        res = converges(m, gam, max_iters=300)
        state = ExitState.initial(m)
        for i in range(min(res.iterations, 200)):
            state = exit_sweep(m, gam, state)
            assert state.i_app.min() == pytest.approx(res.trace[i], abs=1e-9)

    def test_trace_monotone_under_flooding(self):
        m = build_tailbiting(5, 32)
        gam = np.full(32, float(db_to_linear(2.3)))
        res = converges(m, gam)
        assert (np.diff(res.trace) >= -1e-12).all()

    def test_rotation_symmetry(self):
        # Rotating the boosted segment relabels the tailbiting ring.
        m = build_tailbiting(3, 24)
        params = ShapingParams(2.0, 0.25)
        g = float(db_to_linear(1.1))
        base = converges(m, build_snr_vector(g, params, 24, 0))
        for off in (1, 5, 11):
            rot = converges(m, build_snr_vector(g, params, 24, off))
            assert rot.converged == base.converged
            assert rot.iterations == base.iterations
            assert np.allclose(rot.trace, base.trace, atol=1e-12)

    def test_epsilon_validation(self):
        m = build_uncoupled(3)
        with pytest.raises(ValueError):
            converges(m, np.full(2, 1.0), epsilon=0.5)

    def test_windowed_validates_span(self):
        m = build_tailbiting(5, 64)
        with pytest.raises(ValueError):
            converges(m, np.full(64, 2.0), schedule=Schedule.windowed(window_positions=3))

    def test_windowed_converges_at_margin(self):
        m = build_tailbiting(5, 64)
        gam = np.full(64, float(db_to_linear(4.0)))
        res = converges(m, gam, schedule=Schedule.windowed())
        assert res.converged

    def test_windowed_uncoupled_degenerates_to_flooding(self):
        m = build_uncoupled(3)
        gam = np.full(2, float(db_to_linear(1.5)))
        flood = converges(m, gam)
        win = converges(m, gam, schedule=Schedule.windowed(window_positions=8))
        assert win.converged == flood.converged


class TestUpClosedness:
    @pytest.mark.slow
    def test_region_spot_checks(self):
        m = build_tailbiting(3, 32)
        lam = 0.25
        pairs = [(2.2, 0.9), (2.7, 0.8), (3.2, 0.75)]
        for g1_db, g2_db in pairs:
            gam = snr_vector_from_pair(
                float(db_to_linear(g1_db)), float(db_to_linear(g2_db)), lam, 32
            )
            if not converges(m, gam).converged:
                continue
            for d1, d2 in ((0.3, 0.0), (0.0, 0.3), (0.2, 0.2)):
                up = snr_vector_from_pair(
                    float(db_to_linear(g1_db + d1)),
                    float(db_to_linear(g2_db + d2)),
                    lam,
                    32,
                )
                assert converges(m, up).converged
