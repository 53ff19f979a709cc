"""Residual metrics and the association detector for density pairs."""

import numpy as np
import pytest

from densiscope.regoutlier import (
    RegDetectParams,
    detect_regression_outliers,
    residual_bayes,
    residual_lqd,
)
from densiscope.simulate import (
    RandomStream,
    beta_density,
    exchange_contaminate,
    gen_pairs,
)

from conftest import bump_density


def test_params_validation():
    with pytest.raises(ValueError):
        RegDetectParams(n_iters=0)
    with pytest.raises(ValueError):
        RegDetectParams(theta_h=-0.1)


def test_residual_bayes_identity():
    f = beta_density(5.0, 5.0)
    assert residual_bayes(f, f, 0.15, 0.1) == pytest.approx(0.0, abs=1e-9)


def test_residual_bayes_alignment_absorbs_shift():
    f1 = bump_density(120)
    f2 = bump_density(171)  # same shape, shifted by 0.1
    aligned = residual_bayes(f1, f2, theta_h=0.2, alpha_mix=0.1)
    assert aligned <= 1e-3
    unaligned = residual_bayes(f1, f2, theta_h=0.0, alpha_mix=0.1)
    assert unaligned > 100.0 * aligned


def test_residual_bayes_large_shift_skips_alignment():
    f1 = bump_density(40)
    f2 = bump_density(300)
    r = residual_bayes(f1, f2, theta_h=0.15, alpha_mix=0.1)
    assert r > 0.1


def test_residual_lqd_identity_and_blindness():
    f = beta_density(4.0, 7.0)
    assert residual_lqd(f, f, 0.3) == 0.0
    f1 = bump_density(120)
    f2 = bump_density(171)
    blind = residual_lqd(f1, f2, 1e-6)
    assert blind <= 1e-3
    cured = residual_lqd(f1, f2, 0.3)
    assert cured > 10.0 * f1.spacing


def test_detector_requires_enough_pairs(stream):
    pairs = gen_pairs(5, "mixture_beta", stream)
    with pytest.raises(ValueError):
        detect_regression_outliers(pairs)


def test_detector_flags_exchanged_pairs():
    stream = RandomStream(11)
    pairs = gen_pairs(30, "mixture_beta", stream)
    pairs, truth = exchange_contaminate(pairs, 0, 2, stream)
    flagged = detect_regression_outliers(pairs)
    assert flagged <= set(range(30))
    assert len(flagged & truth) >= len(truth) // 2


def test_detector_union_is_swap_symmetric():
    stream = RandomStream(7)
    pairs = gen_pairs(20, "mixture_beta", stream)
    pairs, _ = exchange_contaminate(pairs, 1, 0, stream)
    fwd = detect_regression_outliers(pairs)
    swapped = [(f, g) for g, f in pairs]
    rev = detect_regression_outliers(swapped)
    assert fwd == rev


def test_detector_residual_output_shapes():
    stream = RandomStream(11)
    pairs = gen_pairs(15, "mixture_beta", stream)
    flagged, residuals = detect_regression_outliers(pairs,
                                                    return_residuals=True)
    assert set(residuals) == {"forward", "reverse"}
    for eb, el in residuals.values():
        assert eb.shape == (15,)
        assert el.shape == (15,)
        assert np.all(eb >= 0.0)
        assert np.all(el >= 0.0)


def test_detector_clean_pairs_flag_few():
    stream = RandomStream(23)
    pairs = gen_pairs(30, "mixture_beta", stream)
    flagged = detect_regression_outliers(pairs)
    assert len(flagged) <= 6


def test_first_round_filter_runs():
    stream = RandomStream(31)
    pairs = gen_pairs(20, "mixture_beta", stream)
    flagged = detect_regression_outliers(pairs, first_round_filter=True)
    assert flagged <= set(range(20))
