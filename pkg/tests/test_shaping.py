import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scshape.shaping import (
    EnergyProfile,
    ShapingParams,
    biawgn_capacity,
    db_to_linear,
    linear_to_db,
    llr_mutual_information,
    rate_limit_snr,
    shaped_capacity,
    snr_split,
    two_level_profile,
)

from oracles import capacity_sample_oracle

# Frozen from capacity_sample_oracle(db_to_linear(1.0), 0.5, 4e6, seed 999);
# the sampling noise there is ~1.5e-4.
CAPACITY_MC_1DB = 0.562685921625389
# Classical rate-1/2 bi-AWGN Eb/N0 limit, cross-checked against the
# sampling oracle during development.
RATE_HALF_LIMIT_DB = 0.187


class TestSnrSplit:
    def test_paper_optimum_point(self):
        pt = snr_split(float(db_to_linear(0.65)), ShapingParams(1.85, 1 / 8))
        assert pt.gamma1_db == pytest.approx(2.89, abs=0.02)
        assert pt.gamma2_db == pytest.approx(0.21, abs=0.02)

    def test_no_boost_degenerates(self):
        pt = snr_split(1.7, ShapingParams(1.0, 0.3))
        assert pt.gamma1 == pt.gamma2 == pytest.approx(1.7)

    def test_hand_evaluation(self):
        pt = snr_split(1.0, ShapingParams(2.0, 0.5))
        assert pt.gamma1 == pytest.approx(4 / 3, rel=1e-14)
        assert pt.gamma2 == pytest.approx(2 / 3, rel=1e-14)

    @given(
        gamma=st.floats(1e-3, 1e3),
        phi=st.floats(1.0, 20.0),
        lam=st.floats(0.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_identities(self, gamma, phi, lam):
        pt = snr_split(gamma, ShapingParams(phi, lam))
        assert lam * pt.f1 + (1 - lam) * pt.f2 == pytest.approx(1.0, abs=1e-12)
        assert lam * pt.gamma1 + (1 - lam) * pt.gamma2 == pytest.approx(gamma, rel=1e-12)
        assert pt.gamma1 / pt.gamma2 == pytest.approx(phi, rel=1e-12)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            ShapingParams(0.9, 0.5)
        with pytest.raises(ValueError):
            ShapingParams(2.0, 1.2)
        with pytest.raises(ValueError):
            snr_split(-1.0, ShapingParams(2.0, 0.5))


class TestTwoLevelProfile:
    def test_paper_geometry(self):
        prof = two_level_profile(ShapingParams(1.85, 1 / 8), 128)
        assert (prof.f[:16] > prof.f[16]).all()
        assert len(set(prof.f.tolist())) == 2

    def test_uniform(self):
        prof = two_level_profile(ShapingParams(1.0, 0.0), 32)
        assert (prof.f == 1.0).all()

    def test_normalization_arithmetic(self):
        prof = two_level_profile(ShapingParams(3.0, 0.25), 8)
        assert prof.f[:2] == pytest.approx(2.0)
        assert prof.f[2:] == pytest.approx(2 / 3)

    def test_non_integer_boost_length_rejected(self):
        with pytest.raises(ValueError):
            two_level_profile(ShapingParams(2.0, 1 / 3), 128)

    @given(phi=st.floats(1.0, 10.0), ell=st.integers(0, 16))
    @settings(max_examples=100, deadline=None)
    def test_mean_exactly_one(self, phi, ell):
        prof = two_level_profile(ShapingParams(phi, ell / 16), 16)
        assert prof.f.mean() == pytest.approx(1.0, abs=1e-12)

    def test_profile_invariants(self):
        with pytest.raises(ValueError):
            EnergyProfile(f=np.array([2.0, 0.5]))  # mean != 1
        with pytest.raises(ValueError):
            EnergyProfile(f=np.array([2.0, -0.0]))


class TestCapacity:
    def test_half_rate_limit(self):
        g = float(db_to_linear(RATE_HALF_LIMIT_DB))
        assert biawgn_capacity(g, 0.5) == pytest.approx(0.5, abs=5e-4)

    def test_against_sampling_oracle(self):
        assert biawgn_capacity(float(db_to_linear(1.0)), 0.5) == pytest.approx(
            CAPACITY_MC_1DB, abs=6e-4
        )

    def test_limits(self):
        assert biawgn_capacity(1e-6, 0.5) < 1e-4
        assert biawgn_capacity(1e4, 0.5) > 0.999999

    def test_monotone_in_snr(self):
        gam = np.logspace(-2, 2, 40)
        caps = [biawgn_capacity(g, 0.5) for g in gam]
        assert all(a < b for a, b in zip(caps, caps[1:]))
        assert all(0.0 < c < 1.0 for c in caps)

    def test_llr_mi_vectorized(self):
        sig = np.array([0.5, 1.0, 2.0])
        out = llr_mutual_information(sig)
        assert out.shape == (3,)
        assert (np.diff(out) > 0).all()


class TestShapedCapacity:
    def test_uniform_collapse(self):
        for lam in (0.0, 0.25, 0.8):
            assert shaped_capacity(1.3, ShapingParams(1.0, lam), 0.5) == pytest.approx(
                biawgn_capacity(1.3, 0.5), rel=1e-12
            )

    def test_composition(self):
        expect = 0.5 * biawgn_capacity(4 / 3, 0.5) + 0.5 * biawgn_capacity(2 / 3, 0.5)
        assert shaped_capacity(1.0, ShapingParams(2.0, 0.5), 0.5) == pytest.approx(
            expect, rel=1e-12
        )


class TestRateLimit:
    def test_classical_half_rate(self):
        lim = linear_to_db(rate_limit_snr(0.5, ShapingParams(1.0, 0.0)))
        assert lim == pytest.approx(RATE_HALF_LIMIT_DB, abs=0.005)

    def test_jensen_direction(self):
        base = rate_limit_snr(0.5, ShapingParams(1.0, 0.0))
        for phi in (1.5, 1.85, 3.0):
            for lam in (1 / 8, 1 / 4, 1 / 2):
                assert rate_limit_snr(0.5, ShapingParams(phi, lam)) >= base - 1e-9

    def test_shaped_limit_near_paper_gap(self):
        # Table II gap arithmetic: 0.6463 - 0.3649 ~ 0.2815 dB.
        lim = linear_to_db(rate_limit_snr(0.5, ShapingParams(1.85, 1 / 8)))
        assert lim == pytest.approx(0.2815, abs=0.01)

    def test_bad_rate_rejected(self):
        with pytest.raises(ValueError):
            rate_limit_snr(1.5, ShapingParams(1.0, 0.0))


def test_db_round_trip():
    x = np.array([0.1, 1.0, 7.3])
    assert np.allclose(db_to_linear(linear_to_db(x)), x, rtol=1e-14)


@pytest.mark.slow
def test_capacity_oracle_recompute():
    # Re-derive the frozen constant from the sampling oracle.
    fresh = capacity_sample_oracle(float(db_to_linear(1.0)), 0.5)
    assert fresh == pytest.approx(CAPACITY_MC_1DB, abs=1e-12)
