import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zosmooth.estimators import (
    EstimatorConfig, EstimatorError, Scheme, batched_gradient, central_coordinate,
    central_two_point, forward_coordinate, forward_two_point, one_point, sphere_samples,
)
from zosmooth.oracles import BoundedAdversarial, ZeroOrderOracle, vectorized_oracle
from zosmooth.randomness import SampleStream, sample_unit_sphere

D = 10
A = np.arange(1.0, D + 1) / np.linalg.norm(np.arange(1.0, D + 1))


def linear(a=A, **kw):
    return vectorized_oracle(lambda X: X @ a, a.shape[0], **kw)


def half_square(d, **kw):
    return vectorized_oracle(lambda X: 0.5 * np.einsum("ij,ij->i", X, X), d, **kw)


def test_central_linear_is_exact_projection():
    o = linear()
    for sid in range(5):
        s = SampleStream(4, sid)
        e = sample_unit_sphere(D, s)
        for gamma in (1e-4, 0.3, 7.0):
            np.testing.assert_allclose(central_two_point(o, np.ones(D), gamma, s), D * (A @ e) * e,
                                       rtol=1e-9, atol=1e-12)


def test_central_quadratic_even_terms_cancel():
    o = half_square(4)
    x = np.array([0.5, -1.0, 2.0, 0.1])
    s = SampleStream(1, 9)
    e = sample_unit_sphere(4, s)
    np.testing.assert_allclose(central_two_point(o, x, 0.25, s), 4 * (x @ e) * e, rtol=1e-12, atol=1e-12)


def test_forward_examples():
    o = linear()
    s = SampleStream(2, 3)
    e = sample_unit_sphere(D, s)
    np.testing.assert_allclose(forward_two_point(o, np.zeros(D), 0.1, s), D * (A @ e) * e, rtol=1e-9)
    q = half_square(1)
    s1 = SampleStream(0, 0)
    e1 = sample_unit_sphere(1, s1)
    np.testing.assert_allclose(forward_two_point(q, np.array([1.0]), 0.1, s1),
                               (0.5 * (1 + 0.1 * e1) ** 2 - 0.5) / 0.1 * e1, rtol=1e-12)
    if e1[0] > 0:
        assert forward_two_point(q, np.array([1.0]), 0.1, s1)[0] == pytest.approx(1.05)


def test_one_point_constant_function():
    c, gamma, d = 3.0, 0.5, 6
    o = vectorized_oracle(lambda X: np.full(len(X), c), d)
    S, calls = sphere_samples(o, np.zeros(d), gamma, Scheme.ONE_POINT, 0, 0, 50_000)
    assert calls == 50_000
    np.testing.assert_allclose(np.sum(S**2, axis=1), (d * c / gamma) ** 2, rtol=1e-12)
    assert np.linalg.norm(S.mean(axis=0)) < 4 * (d * c / gamma) / np.sqrt(50_000)


def test_one_point_linear_mean():
    o = linear()
    g = batched_gradient(o, np.zeros(D), EstimatorConfig("one_point", 0.1, batch_size=100_000), 5).g
    assert np.linalg.norm(g - A) < 4 * np.sqrt(D / 100_000) * 1.5


def test_one_point_single_sample_matches_formula():
    o = linear()
    s = SampleStream(3, 5)
    e = sample_unit_sphere(D, s)
    x = np.full(D, 0.2)
    np.testing.assert_allclose(one_point(o, x, 0.1, s), D * (A @ (x + 0.1 * e)) / 0.1 * e, rtol=1e-12)


def test_coordinate_examples():
    o = linear()
    np.testing.assert_allclose(central_coordinate(o, np.zeros(D), 0.1), A, rtol=1e-12)
    np.testing.assert_allclose(forward_coordinate(o, np.zeros(D), 0.1), A, rtol=1e-9)
    q = half_square(3)
    x = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(central_coordinate(q, x, 0.1), x, rtol=1e-12)
    cube = vectorized_oracle(lambda X: X[:, 0] ** 3, 1)
    assert central_coordinate(cube, np.array([1.0]), 0.1)[0] == pytest.approx(3.01, abs=1e-12)
    sq = half_square(1)
    assert forward_coordinate(sq, np.array([1.0]), 0.1)[0] == pytest.approx(1.05, abs=1e-12)


@pytest.mark.parametrize("scheme,expected", [
    ("central", lambda B, d: 2 * B), ("forward", lambda B, d: 2 * B), ("one_point", lambda B, d: B),
    ("central_coord", lambda B, d: 2 * d), ("forward_coord", lambda B, d: d + 1),
])
def test_call_accounting(scheme, expected):
    for B in (1, 8):
        o = linear()
        cfg = EstimatorConfig(scheme, 0.01, batch_size=B)
        est = batched_gradient(o, np.zeros(D), cfg, SampleStream(0))
        assert est.oracle_calls_used == o.calls == expected(B, D) == cfg.calls_per_estimate(D)


def test_forward_cache_base_only_when_safe():
    o = linear()
    cfg = EstimatorConfig("forward", 0.01, batch_size=8, cache_base=True)
    assert batched_gradient(o, np.zeros(D), cfg, 0).oracle_calls_used == 9
    noisy = linear(noise=BoundedAdversarial(1e-3))
    assert batched_gradient(noisy, np.zeros(D), cfg, 0).oracle_calls_used == 16


def test_batch_one_equals_single_sample():
    o = linear()
    s = SampleStream(12, 40)
    single = central_two_point(o, np.ones(D), 0.05, s)
    batched = batched_gradient(o, np.ones(D), EstimatorConfig("central", 0.05, 1), s).g
    np.testing.assert_array_equal(single, batched)


def test_batch_is_mean_of_own_streams():
    o = linear()
    x = np.linspace(-1, 1, D)
    est = batched_gradient(o, x, EstimatorConfig("central", 0.05, 5), SampleStream(3, 100))
    samples = [central_two_point(o, x, 0.05, SampleStream(3, 100 + j)) for j in range(5)]
    np.testing.assert_allclose(est.g, np.mean(samples, axis=0), rtol=1e-13, atol=1e-15)
    assert est.samples_used == 5


def test_unbiased_and_second_moment():
    n = 100_000
    S, _ = sphere_samples(linear(), np.zeros(D), 1e-3, Scheme.CENTRAL, 0, 0, n)
    assert np.linalg.norm(S.mean(axis=0) - A) <= 4 * np.sqrt(D / n)
    m2 = np.mean(np.sum(S**2, axis=1))
    assert 0.95 * D <= m2 <= 1.05 * D


def test_variance_scales_inverse_with_batch():
    o = linear()
    reps = 4000
    var = {}
    for B in (1, 4, 16, 64):
        S, _ = sphere_samples(o, np.zeros(D), 1e-3, Scheme.CENTRAL, 1, 0, reps * B)
        means = S.reshape(reps, B, D).mean(axis=1)
        var[B] = np.mean(np.sum((means - A) ** 2, axis=1))
    for B in (4, 16, 64):
        assert var[1] / B / 1.5 <= var[B] <= 1.5 * var[1] / B


def test_noise_blow_up_scales_with_inverse_gamma():
    o = vectorized_oracle(lambda X: np.zeros(len(X)), 5, noise=BoundedAdversarial(1e-3))
    mags = []
    for gamma in (0.2, 0.1):
        S, _ = sphere_samples(o, np.zeros(5), gamma, Scheme.CENTRAL, 0, 0, 20_000)
        mags.append(np.mean(np.linalg.norm(S, axis=1)))
    assert 1.6 <= mags[1] / mags[0] <= 2.4


def test_estimator_errors():
    with pytest.raises(EstimatorError):
        EstimatorConfig("central", gamma=0.0)
    with pytest.raises(EstimatorError):
        EstimatorConfig("central", batch_size=0)
    with pytest.raises(ValueError):
        EstimatorConfig("median")
    with pytest.raises(EstimatorError):
        central_two_point(linear(), np.zeros(D), -1.0, 0)
    with pytest.raises(EstimatorError):
        central_two_point(linear(), np.zeros(D + 1), 0.1, 0)


def test_exact_scheme_uses_gradient():
    a = np.array([1.0, -2.0])
    o = ZeroOrderOracle(lambda X, xi: X @ a, 2, gradient=lambda x, xi: a)
    est = batched_gradient(o, np.zeros(2), EstimatorConfig("exact", batch_size=4), 0)
    np.testing.assert_array_equal(est.g, a)
    assert est.oracle_calls_used == 1


def test_stochastic_minibatch_uses_common_xi():
    # f(x, xi) = xi * x with xi drawn per sample; central difference cancels nothing but xi
    o = ZeroOrderOracle(lambda X, xi: xi.mean(axis=1) * X[:, 0], 1, num_components=5)
    cfg = EstimatorConfig("central", 0.1, batch_size=64, minibatch=1)
    S, calls = sphere_samples(o, np.array([2.0]), 0.1, Scheme.CENTRAL, 0, 0, 64, minibatch=1)
    assert calls == 128
    assert set(np.round(np.abs(S[:, 0]), 10)) <= {0.0, 1.0, 2.0, 3.0, 4.0}
    assert batched_gradient(o, np.array([2.0]), cfg, 0).oracle_calls_used == 128


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), B=st.integers(1, 40), workers=st.sampled_from([2, 4, 8]))
def test_worker_count_bit_identical(seed, B, workers):
    x = np.linspace(-1, 1, 7)
    f = lambda X: np.abs(X).sum(axis=1)  # noqa: E731
    cfg = EstimatorConfig("central", 1e-3, B)
    a = batched_gradient(vectorized_oracle(f, 7, workers=1, chunk_rows=8), x, cfg, seed).g
    b = batched_gradient(vectorized_oracle(f, 7, workers=workers, chunk_rows=8), x, cfg, seed).g
    np.testing.assert_array_equal(a, b)


def test_block_estimate_touches_only_block():
    o = linear()
    blk = slice(2, 5)
    est = batched_gradient(o, np.zeros(D), EstimatorConfig("central", 1e-3, 50_000), 0, block=blk)
    assert est.g.shape == (3,)
    assert np.linalg.norm(est.g - A[blk]) < 4 * np.sqrt(3 / 50_000) * np.linalg.norm(A[blk]) * 2
    c = batched_gradient(o, np.zeros(D), EstimatorConfig("central_coord", 1e-3), 0, block=blk)
    np.testing.assert_allclose(c.g, A[blk], rtol=1e-9)
    assert c.oracle_calls_used == 6
