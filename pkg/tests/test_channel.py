import numpy as np
import pytest

from scshape.montecarlo.channel import expand_profile, simulate_channel
from scshape.montecarlo.lifting import lift
from scshape.protograph import build_tailbiting
from scshape.shaping import ShapingParams, db_to_linear, two_level_profile


@pytest.fixture(scope="module")
def code():
    return lift(build_tailbiting(5, 128), 16, seed=2)


def test_llr_statistics_per_segment(code):
    # Empirical LLR mean/variance vs (2f/sigma^2, 4f/sigma^2), separately
    # for boosted and unboosted segments.
    params = ShapingParams(1.85, 1 / 8)
    prof = two_level_profile(params, 128)
    gamma_db = 1.0
    ch = simulate_channel(code, prof, gamma_db, np.random.default_rng(0))
    sigma2 = 1.0 / (2 * 0.5 * float(db_to_linear(gamma_db)))
    assert ch.sigma2 == pytest.approx(sigma2)
    boost_bits = 16 * code.q
    for f, sl in ((prof.f[0], slice(0, boost_bits)), (prof.f[-1], slice(boost_bits, None))):
        seg = ch.llr[sl]
        mean_th = 2 * f / sigma2
        var_th = 4 * f / sigma2
        n = seg.size
        assert seg.mean() == pytest.approx(mean_th, abs=3 * np.sqrt(var_th / n))
        # Sample variance concentrates at rate sqrt(2/n).
        assert seg.var() == pytest.approx(var_th, rel=3 * np.sqrt(2 / n))


def test_noiseless_limit(code):
    prof = two_level_profile(ShapingParams(1.0, 0.0), 128)
    ch = simulate_channel(code, prof, 50.0, np.random.default_rng(1))
    assert (ch.llr > 0).all()
    assert ch.llr.min() > 1e3


def test_boosted_segment_more_reliable(code):
    prof = two_level_profile(ShapingParams(1.85, 1 / 8), 128)
    ch = simulate_channel(code, prof, 1.0, np.random.default_rng(2))
    boost_bits = 16 * code.q
    ber_boost = (ch.llr[:boost_bits] < 0).mean()
    ber_rest = (ch.llr[boost_bits:] < 0).mean()
    assert ber_boost < ber_rest


def test_profile_expansion(code):
    prof = two_level_profile(ShapingParams(2.0, 0.25), 128)
    f_bits = expand_profile(prof, code.q)
    assert f_bits.shape == (code.n,)
    assert (f_bits[: 32 * code.q] == prof.f[0]).all()


def test_profile_length_mismatch(code):
    bad = two_level_profile(ShapingParams(2.0, 0.25), 64)
    with pytest.raises(ValueError):
        simulate_channel(code, bad, 1.0, np.random.default_rng(0))


def test_seed_is_recorded_and_reproducible(code):
    prof = two_level_profile(ShapingParams(1.0, 0.0), 128)
    a = simulate_channel(code, prof, 1.0, 42)
    b = simulate_channel(code, prof, 1.0, 42)
    assert a.seed == 42
    assert np.array_equal(a.llr, b.llr)
