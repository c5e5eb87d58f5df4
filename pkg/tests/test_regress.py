"""Regression core: accumulation, the linear solve against an independent
least-squares oracle, fitting, and prediction."""

import numpy as np
import pytest

from helpers import identity_task
from tribasis import (
    CoefficientVector,
    FunctionObservation,
    IllConditionedError,
    TrainingSummary,
    accumulate,
    average_truncation_radius,
    enumerate_ball,
    fit,
    fit_cv,
    predict_coeffs,
    predict_function,
    project,
    reconstruct,
    sample_feature_map,
    solve,
)


def _random_problem(rng, n=50, feature_count=20, targets=3):
    z = rng.standard_normal((n, feature_count))
    a = rng.standard_normal((n, targets))
    return z, a


def _lstsq_oracle(z, a):
    # independent least-squares route: SVD-based lstsq per target column,
    # never touching the normal-equations path under test
    cols = [np.linalg.lstsq(z, a[:, j], rcond=None)[0] for j in range(a.shape[1])]
    return np.stack(cols, axis=1)


# --------------------------------------------------------------------------
# accumulation


def test_accumulate_single_pair():
    rng = np.random.default_rng(0)
    fmap = sample_feature_map(3, 8, 1.0, seed=1)
    u = CoefficientVector(enumerate_ball(1, 2.0), rng.standard_normal(3))
    v = CoefficientVector(enumerate_ball(1, 1.0), rng.standard_normal(2))
    summary = accumulate(TrainingSummary.zeros(8, 2), u, v, fmap)
    from tribasis import compute_features

    z = compute_features(fmap, u.coefficients)
    assert np.array_equal(summary.gram, np.outer(z, z))
    assert np.array_equal(summary.cross, np.outer(z, v.coefficients))
    assert summary.count == 1


def test_accumulate_zero_output_leaves_cross_unchanged():
    rng = np.random.default_rng(2)
    fmap = sample_feature_map(3, 8, 1.0, seed=1)
    u = CoefficientVector(enumerate_ball(1, 2.0), rng.standard_normal(3))
    v = CoefficientVector(enumerate_ball(1, 1.0), np.zeros(2))
    summary = accumulate(TrainingSummary.zeros(8, 2), u, v, fmap)
    assert np.all(summary.cross == 0.0)
    assert np.any(summary.gram != 0.0)


def test_shard_merge_matches_union():
    rng = np.random.default_rng(3)
    fmap = sample_feature_map(4, 10, 1.0, seed=5)
    uset, vset = enumerate_ball(1, 3.0), enumerate_ball(1, 2.0)
    pairs = [
        (
            CoefficientVector(uset, rng.standard_normal(4)),
            CoefficientVector(vset, rng.standard_normal(3)),
        )
        for _ in range(100)
    ]
    whole = TrainingSummary.zeros(10, 3)
    for u, v in pairs:
        whole = accumulate(whole, u, v, fmap)
    first = TrainingSummary.zeros(10, 3)
    for u, v in pairs[:37]:
        first = accumulate(first, u, v, fmap)
    second = TrainingSummary.zeros(10, 3)
    for u, v in pairs[37:]:
        second = accumulate(second, u, v, fmap)
    merged = first.merge(second)
    np.testing.assert_allclose(merged.gram, whole.gram, rtol=1e-10)
    np.testing.assert_allclose(merged.cross, whole.cross, rtol=1e-10)
    assert merged.count == whole.count == 100


def test_accumulate_dimension_checks():
    fmap = sample_feature_map(3, 8, 1.0, seed=1)
    u_bad = CoefficientVector(enumerate_ball(1, 3.0), np.zeros(4))
    v = CoefficientVector(enumerate_ball(1, 1.0), np.zeros(2))
    with pytest.raises(ValueError):
        accumulate(TrainingSummary.zeros(8, 2), u_bad, v, fmap)
    u = CoefficientVector(enumerate_ball(1, 2.0), np.zeros(3))
    with pytest.raises(ValueError):
        accumulate(TrainingSummary.zeros(8, 3), u, v, fmap)


# --------------------------------------------------------------------------
# solve


def test_solve_identity_gram():
    cross = np.random.default_rng(4).standard_normal((6, 2))
    summary = TrainingSummary(np.eye(6), cross, 6)
    np.testing.assert_allclose(solve(summary, 0.0), cross, rtol=1e-14)


def test_solve_huge_ridge_shrinks_to_zero():
    rng = np.random.default_rng(5)
    z, a = _random_problem(rng)
    summary = TrainingSummary(z.T @ z, z.T @ a, 50)
    psi = solve(summary, 1e12)
    assert np.linalg.norm(psi) < 1e-6 * np.linalg.norm(summary.cross)


def test_solve_matches_lstsq_oracle():
    rng = np.random.default_rng(6)
    for _ in range(20):
        z, a = _random_problem(rng)
        summary = TrainingSummary(z.T @ z, z.T @ a, z.shape[0])
        psi = solve(summary, 0.0)
        oracle = _lstsq_oracle(z, a)
        assert np.linalg.norm(psi - oracle) <= 1e-8 * np.linalg.norm(oracle)


def test_tiny_ridge_close_to_ols():
    rng = np.random.default_rng(7)
    z, a = _random_problem(rng)
    summary = TrainingSummary(z.T @ z, z.T @ a, 50)
    ols = solve(summary, 0.0)
    ridged = solve(summary, 1e-6)
    assert np.linalg.norm(ridged - ols) <= 1e-4 * np.linalg.norm(ols)


def test_ridge_continuity_and_monotone_shrinkage():
    rng = np.random.default_rng(8)
    z, a = _random_problem(rng)
    summary = TrainingSummary(z.T @ z, z.T @ a, 50)
    ols = solve(summary, 0.0)
    gaps = []
    norms = []
    for lam in (1e-2, 1e-4, 1e-6):
        psi = solve(summary, lam)
        gaps.append(np.abs(psi - ols).max())
        norms.append(np.linalg.norm(psi))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-6
    lams = (1e-2, 1e-1, 1.0, 10.0)
    frob = [np.linalg.norm(solve(summary, lam)) for lam in lams]
    assert all(x > y for x, y in zip(frob, frob[1:]))


def test_singular_gram_raises_named_condition():
    z = np.ones((30, 5))  # rank one
    a = np.ones((30, 2))
    summary = TrainingSummary(z.T @ z, z.T @ a, 30)
    with pytest.raises(IllConditionedError) as err:
        solve(summary, 0.0)
    assert err.value.condition_estimate > 1e12
    assert "condition estimate" in str(err.value)
    # a positive ridge makes the same summary solvable
    solve(summary, 1e-3)


def test_negative_ridge_rejected():
    summary = TrainingSummary.zeros(3, 1)
    with pytest.raises(ValueError):
        solve(summary, -1.0)


# --------------------------------------------------------------------------
# fit / predict


def _tiny_task(seed, n_train=40, n_points=60):
    train, test, truths = identity_task(seed, n_train, 5, n_points)
    uset = enumerate_ball(1, 3.0)
    fmap = sample_feature_map(len(uset), 50, 2.0, seed=seed + 1)
    return train, test, uset, fmap


def test_fit_zero_outputs_gives_zero_model():
    train, _, uset, fmap = _tiny_task(13)
    zeroed = [
        (p, FunctionObservation("noisy-evaluations", q.points, np.zeros(q.n)))
        for p, q in train
    ]
    model = fit(zeroed, uset, uset, fmap, ridge_lambda=1e-8)
    assert np.all(model.psi == 0.0)
    pred = predict_coeffs(model, train[0][0])
    assert np.all(pred.coefficients == 0.0)
    assert predict_function(model, train[0][0], 0.3) == 0.0


def test_fit_deterministic():
    train, _, uset, fmap = _tiny_task(14)
    m1 = fit(train, uset, uset, fmap, 1e-6)
    m2 = fit(train, uset, uset, fmap, 1e-6)
    assert np.array_equal(m1.psi, m2.psi)


def test_fit_shard_invariance_under_shuffling():
    # well-conditioned regime (more instances than features) so reordering
    # cost is pure summation round-off, not solve amplification
    train, _, uset, _ = _tiny_task(15, n_train=60)
    fmap = sample_feature_map(len(uset), 20, 2.0, seed=16)
    m1 = fit(train, uset, uset, fmap, 1e-6)
    order = np.random.default_rng(0).permutation(len(train))
    m2 = fit([train[i] for i in order], uset, uset, fmap, 1e-6)
    assert np.linalg.norm(m2.psi - m1.psi) <= 1e-9 * np.linalg.norm(m1.psi)


def test_fit_empty_dataset():
    _, _, uset, fmap = _tiny_task(16)
    with pytest.raises(ValueError):
        fit([], uset, uset, fmap, 0.0)


def test_fit_equals_accumulate_solve_composition():
    # keep the instance count above the feature count so the comparison is
    # not dominated by solve-amplified round-off
    train, _, uset, _ = _tiny_task(17, n_train=40)
    fmap = sample_feature_map(len(uset), 12, 2.0, seed=18)
    model = fit(train, uset, uset, fmap, 1e-6)
    summary = TrainingSummary.zeros(fmap.feature_count, len(uset))
    for p, q in train:
        summary = accumulate(summary, project(p, uset), project(q, uset), fmap)
    from tribasis.regress import _accumulate_matrices

    batched = _accumulate_matrices(
        np.vstack([project(p, uset).coefficients for p, _ in train]),
        np.vstack([project(q, uset).coefficients for _, q in train]),
        fmap,
    )
    np.testing.assert_allclose(batched.gram, summary.gram, rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(batched.cross, summary.cross, rtol=1e-10, atol=1e-14)
    psi = solve(summary, 1e-6)
    np.testing.assert_allclose(model.psi, psi, rtol=1e-6, atol=1e-10)


def test_predict_matches_manual_recomposition():
    from tribasis import compute_features

    train, test, uset, fmap = _tiny_task(18)
    model = fit(train, uset, uset, fmap, 1e-6)
    obs = test[0][0]
    manual = compute_features(fmap, project(obs, uset).coefficients) @ model.psi
    assert np.array_equal(predict_coeffs(model, obs).coefficients, manual)
    x = 0.4
    assert predict_function(model, obs, x) == reconstruct(
        predict_coeffs(model, obs), x
    )


def test_predict_dimension_mismatch():
    train, _, uset, fmap = _tiny_task(19)
    model = fit(train, uset, uset, fmap, 1e-6)
    bad = FunctionObservation("noisy-evaluations", [[0.1, 0.2]], [1.0])
    with pytest.raises(ValueError):
        predict_coeffs(model, bad)


def test_identity_task_beats_projection_floor():
    # q = p: predictions from noisy input observations should carry less
    # coefficient error than projecting equally noisy output observations
    # directly, because regression on many instances shrinks the noise
    train, test, truths = identity_task(42, 2000, 200, 200)
    uset = enumerate_ball(1, 6.0)
    res = fit_cv(train, uset, uset, feature_count=600, seed=9)
    m = len(uset)
    floor = 0.0
    pred_err = 0.0
    for (pin, pout), p in zip(test, truths):
        a_true = p.coefficients[:m]  # shared lexicographic prefix
        floor += ((project(pout, uset).coefficients - a_true) ** 2).sum()
        pred_err += (
            (predict_coeffs(res.model, pin).coefficients - a_true) ** 2
        ).sum()
    assert pred_err < floor


def test_average_truncation_radius():
    train, _, _, _ = _tiny_task(20, n_train=10, n_points=120)
    t = average_truncation_radius(
        [p for p, _ in train], (0.0, 1.0, 2.0, 3.0, 4.0), folds=4
    )
    assert 0.0 <= t <= 4.0
    with pytest.raises(ValueError):
        average_truncation_radius([], (0.0, 1.0), 2)


def test_fit_cv_deterministic_and_refits_on_all_data():
    train, _, uset, _ = _tiny_task(21)
    r1 = fit_cv(train, uset, uset, feature_count=40, seed=3)
    r2 = fit_cv(train, uset, uset, feature_count=40, seed=3)
    assert np.array_equal(r1.model.psi, r2.model.psi)
    assert r1.bandwidth == r2.bandwidth and r1.ridge_lambda == r2.ridge_lambda
    assert r1.model.training_count == len(train)


def test_borderline_conditioning_uses_pivoted_fallback():
    # gram with condition ~1e9 sits between the Cholesky comfort zone and
    # the hard 1e12 refusal: ridgeless solve must still return a usable
    # solution through the pivoted symmetric path
    rng = np.random.default_rng(30)
    d = 8
    eigenvalues = np.logspace(0, -9, d)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    gram = (q * eigenvalues) @ q.T
    gram = (gram + gram.T) / 2.0
    cross = rng.standard_normal((d, 2))
    summary = TrainingSummary(gram, cross, d)
    psi = solve(summary, 0.0)
    residual = gram @ psi - cross
    assert np.linalg.norm(residual) < 1e-5 * np.linalg.norm(cross)
