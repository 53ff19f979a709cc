"""The density-to-density regressor: FPCA, kernel solve, GCV, weights."""

import numpy as np
import pytest

from densiscope.curves import GridCurve
from densiscope.metrics import iae
from densiscope.regression import (
    FpcaBasis,
    RegressionModel,
    WeightVector,
    design_weights,
    fit,
    fpca,
    gcv_select,
    objective,
    predict,
    sigma_heuristic,
    solve_coefficients,
)
from densiscope.simulate import RandomStream, beta_density, gen_pairs
from densiscope.transforms import LqdCurve, lqd


def _curves_from_rows(rows):
    return [GridCurve(0.0, 1.0, r) for r in rows]


def _random_psd(rng, m):
    M = rng.normal(size=(m, m))
    return M @ M.T + 0.1 * np.eye(m)


def test_fpca_identical_curves_have_zero_scores():
    curves = [GridCurve(0.0, 1.0, np.sin(np.linspace(0, 3, 64)))] * 5
    basis, scores = fpca(curves, 2)
    assert np.allclose(scores, 0.0, atol=1e-9)


def test_fpca_rank_one_family_reconstructs():
    t = np.linspace(0.0, 1.0, 128)
    phi = np.sqrt(2.0) * np.sin(np.pi * t)
    rows = [1.0 + c * phi for c in (-2.0, -0.5, 0.3, 1.1, 2.4)]
    curves = _curves_from_rows(rows)
    basis, scores = fpca(curves, 1)
    for curve, row in zip(curves, scores):
        rec = basis.reconstruct(row)
        assert np.max(np.abs(rec.values - curve.values)) < 1e-6


def test_fpca_orthonormal_eigenfunctions(stream):
    rows = stream.rng.normal(size=(10, 96))
    rows = np.cumsum(rows, axis=1) / 10.0  # smooth-ish random curves
    basis, scores = fpca(_curves_from_rows(rows), 4)
    grid = basis.mean.grid
    for j, pj in enumerate(basis.eigenfunctions):
        for k, pk in enumerate(basis.eigenfunctions):
            ip = np.trapezoid(pj.values * pk.values, grid)
            assert ip == pytest.approx(1.0 if j == k else 0.0, abs=1e-6)
    assert np.all(np.diff(basis.eigenvalues) <= 1e-12)
    cov = np.cov(scores.T)
    off = cov - np.diag(np.diag(cov))
    assert np.max(np.abs(off)) < 1e-6


def test_fpca_requires_more_curves_than_components():
    curves = [GridCurve(0.0, 1.0, np.ones(16))] * 3
    with pytest.raises(ValueError):
        fpca(curves, 3)


def test_sigma_heuristic_two_curves():
    a = LqdCurve(np.zeros(64), 0.3)
    b = LqdCurve(np.ones(64), 0.3)
    # distances (0, d, d, 0) over the four ordered pairs average to d/2
    assert sigma_heuristic([a, b]) == pytest.approx(0.5, abs=1e-9)


def test_sigma_heuristic_degenerate_and_reorder():
    a = LqdCurve(np.zeros(64), 0.3)
    with pytest.raises(ValueError):
        sigma_heuristic([a, a])
    rng = np.random.default_rng(0)
    curves = [LqdCurve(rng.normal(size=64), 0.3) for _ in range(5)]
    s1 = sigma_heuristic(curves)
    s2 = sigma_heuristic(curves[::-1])
    assert s1 == pytest.approx(s2, rel=1e-9)


def test_unit_weights_match_unweighted_fit(stream):
    pairs = gen_pairs(10, "mixture_beta", stream)
    gs, fs = [p[0] for p in pairs], [p[1] for p in pairs]
    plain = fit(gs, fs, lambda_s=0.5)
    weighted = fit(gs, fs, lambda_s=0.5, weights=np.ones(10))
    rel = np.linalg.norm(plain.B - weighted.B) / np.linalg.norm(plain.B)
    assert rel <= 1e-8


def test_single_pair_closed_form():
    for w, lam, y in [(0.7, 0.3, 2.0), (1.0, 0.0, 1.5), (0.2, 2.0, -1.0)]:
        B = solve_coefficients(np.array([[1.0]]), np.array([[y]]),
                               np.array([w]), lam)
        assert B[0, 0] == pytest.approx(y * w * w / (w * w + lam), abs=1e-10)


def test_fast_path_matches_general_path(stream):
    rng = stream.rng
    n, m = 8, 3
    A = _random_psd(rng, n)
    A = A / np.max(np.abs(A))
    Y = rng.normal(size=(n, m))
    w = rng.uniform(0.1, 1.0, n)
    fast = solve_coefficients(A, Y, w, 0.2)
    slow = solve_coefficients(A, Y, w, 0.2, force_general=True)
    assert np.linalg.norm(fast - slow) / np.linalg.norm(fast) <= 1e-8


def test_normal_equation_residual(stream):
    rng = stream.rng
    for _ in range(5):
        n, m = 7, 3
        A = _random_psd(rng, n)
        K = _random_psd(rng, m)
        Y = rng.normal(size=(n, m))
        w = rng.uniform(0.1, 1.0, n)
        lam = 0.3
        B = solve_coefficients(A, Y, w, lam, K=K)
        W2 = np.diag(w ** 2)
        lhs = A @ W2 @ A @ B @ K @ K + lam * A @ B @ K
        rhs = A @ W2 @ Y @ K
        rel = np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)
        assert rel <= 1e-6


def test_objective_descent(stream):
    rng = stream.rng
    n, m = 6, 2
    A = _random_psd(rng, n)
    K = _random_psd(rng, m)
    Y = rng.normal(size=(n, m))
    w = rng.uniform(0.1, 1.0, n)
    lam = 0.4
    B = solve_coefficients(A, Y, w, lam, K=K)
    j0 = objective(A, Y, B, w, lam, K)
    for _ in range(100):
        delta = rng.normal(scale=1e-3, size=B.shape)
        assert j0 <= objective(A, Y, B + delta, w, lam, K) + 1e-8


def test_zero_regularization_interpolates(stream):
    pairs = gen_pairs(6, "mixture_beta", stream)
    gs, fs = [p[0] for p in pairs], [p[1] for p in pairs]
    model = fit(gs, fs, lambda_s=0.0, m=4)
    psis_f = [lqd(f, model.alpha) for f in fs]
    Y = model.basis.scores(np.array([p.values for p in psis_f]))
    resid = np.linalg.norm(model.A @ model.B @ model.K - Y)
    assert resid / max(np.linalg.norm(Y), 1.0) <= 1e-6


def test_gcv_single_element_grid(stream):
    pairs = gen_pairs(6, "mixture_beta", stream)
    gs, fs = [p[0] for p in pairs], [p[1] for p in pairs]
    assert gcv_select(gs, fs, lambda_grid=[0.37]) == 0.37


def test_gcv_single_pair_returns_smallest(stream):
    pairs = gen_pairs(1, "mixture_beta", stream)
    lam = gcv_select([pairs[0][0]], [pairs[0][1]],
                     lambda_grid=[1.0, 0.01, 0.5])
    assert lam == 0.01


def test_predict_constant_responses(stream):
    pairs = gen_pairs(8, "mixture_beta", stream)
    gs = [p[0] for p in pairs]
    resp = beta_density(6.0, 4.0)
    model = fit(gs, [resp] * 8, lambda_s=0.1)
    pred = predict(model, gs[0])
    assert iae(pred, resp) <= 1e-3


def test_predict_training_pair_roundtrip(stream):
    pairs = gen_pairs(10, "mixture_beta", stream)
    gs, fs = [p[0] for p in pairs], [p[1] for p in pairs]
    model = fit(gs, fs, lambda_s=0.0, m=8)
    errs = [iae(predict(model, g), f) for g, f in zip(gs, fs)]
    assert np.median(errs) <= 0.05


def test_model_persistence_roundtrip(stream):
    pairs = gen_pairs(6, "mixture_beta", stream)
    gs, fs = [p[0] for p in pairs], [p[1] for p in pairs]
    model = fit(gs, fs, lambda_s=0.2)
    clone = RegressionModel.from_dict(model.to_dict())
    p1 = predict(model, gs[2])
    p2 = predict(clone, gs[2])
    assert np.max(np.abs(p1.values - p2.values)) < 1e-9


def test_design_weights_no_flags_is_all_ones():
    stats = np.column_stack([np.arange(5.0), np.arange(5.0)])
    resid = np.column_stack([np.arange(5.0), np.arange(5.0)])
    wv = design_weights(5, set(), set(), stats, stats, set(), resid, 1.0, 1.0)
    assert np.all(wv.w == 1.0)


def test_design_weights_zero_decay_is_all_ones():
    stats = np.column_stack([np.arange(5.0), np.arange(5.0)])
    resid = np.column_stack([np.arange(5.0), np.arange(5.0)])
    wv = design_weights(5, {0, 3}, {1}, stats, stats, {2}, resid, 0.0, 0.0)
    assert np.allclose(wv.w, 1.0)


def test_design_weights_median_statistic_keeps_weight_one():
    deltas = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    stats = np.column_stack([deltas, deltas])
    resid = np.column_stack([deltas, deltas])
    # the flagged curve sits exactly at both sample medians
    wv = design_weights(5, {2}, set(), stats, stats, set(), resid, 1.0, 1.0)
    assert wv.w[2] == pytest.approx(1.0)
    assert np.all(wv.w[[0, 1, 3, 4]] == 1.0)


def test_design_weights_downweights_extremes():
    deltas = np.array([1.0, 1.1, 0.9, 1.0, 9.0])
    stats = np.column_stack([deltas, deltas])
    resid = np.column_stack([deltas, deltas])
    wv = design_weights(5, {4}, set(), stats, stats, {4}, resid, 1.0, 1.0)
    assert wv.w[4] < 0.1
    assert np.all(wv.w[:4] == 1.0)
    assert np.allclose(wv.w, wv.w_typeI * wv.w_typeII)
    assert np.all((wv.w > 0.0) & (wv.w <= 1.0))


def test_weightvector_ones():
    wv = WeightVector.ones(4)
    assert np.all(wv.w == 1.0)
