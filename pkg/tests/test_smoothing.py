import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zosmooth.estimators import EstimatorConfig, batched_gradient
from zosmooth.oracles import vectorized_oracle
from zosmooth.randomness import SampleStream
from zosmooth.smoothing import (
    PlanError, chi, choose_gamma, kappa, lambda_factor, lipschitz_of_smoothed, make_plan,
    plan_report, saddle_cross_lipschitz, saddle_gammas, smoothed_value_mc,
)

mp.mp.dps = 40


def oracle_plan(eps, M, M2, R, p, d):
    """Independent high-precision evaluation of the plan formulas."""
    eps, M, M2, R, d = map(mp.mpf, (eps, M, M2, R, d))
    q = mp.inf if p == 1 else mp.mpf(p) / (p - 1)
    if q == mp.inf:
        kap, ch = mp.log(d) / d, 2 * mp.log(d)
    else:
        kap = min(q, mp.log(d)) * d ** (2 / q - 1)
        ch = min(q - 1, 2 * mp.log(d))
    lam = 2 * ch + mp.sqrt(3 * mp.pi * ch) + 3
    sigma2 = 2 * kap * d * M2**2
    N = int(mp.ceil(4 * mp.sqrt(2) * d ** mp.mpf(0.25) * mp.sqrt(M2 * M) * R / eps))
    B = max(1, int(mp.ceil(256 * lam * sigma2 * R**2 / (eps**2 * N))))
    return {"kappa": kap, "chi": ch, "lam": lam, "sigma2": sigma2, "N": N, "B": B}


def test_choose_gamma():
    assert choose_gamma(0.1, 1) == 0.05
    assert choose_gamma(1, 0.5) == 1
    assert choose_gamma(0.01, 10) == pytest.approx(5e-4)
    with pytest.raises(PlanError):
        choose_gamma(0, 1)


def test_lipschitz_of_smoothed():
    assert lipschitz_of_smoothed(100, 1, 0.05) == pytest.approx(200)
    assert lipschitz_of_smoothed(1, 1, 1) == 1
    assert lipschitz_of_smoothed(16, 2, 0.1) == pytest.approx(80)
    with pytest.raises(PlanError):
        lipschitz_of_smoothed(4, 1, -0.1)


def test_kappa_examples():
    for d in (8, 100, 10**6):
        assert kappa(2, d) == pytest.approx(2.0)
    assert kappa(1, 55) == pytest.approx(math.log(55) / 55)
    assert kappa(1, 55) == pytest.approx(0.0729, abs=2e-4)
    assert kappa(2, 2) == pytest.approx(math.log(2))
    with pytest.raises(PlanError):
        kappa(2.5, 10)
    with pytest.raises(PlanError):
        kappa(2, 1)


def test_kappa_shape():
    ds = [10, 100, 1000, 10**5]
    assert len({round(kappa(2, d), 12) for d in ds}) == 1
    ratios = [kappa(1, d) * d / math.log(d) for d in ds]
    assert max(ratios) <= 1.0 + 1e-12


def test_lambda_examples():
    assert lambda_factor(2, 50) == pytest.approx(5 + math.sqrt(3 * math.pi))
    assert lambda_factor(2, 50) == pytest.approx(8.070, abs=5e-4)
    assert chi(1, math.e) == pytest.approx(2.0)
    assert lambda_factor(1, math.e) == pytest.approx(7 + math.sqrt(6 * math.pi))
    assert lambda_factor(1, math.e) == pytest.approx(11.34, abs=5e-3)
    # p = 2 lambda stays under the 9 of the batched-variance bound
    assert lambda_factor(2, 1000) < 9


def test_lambda_growth_p1():
    for d in (10**2, 10**4, 10**8):
        lam = lambda_factor(1, d)
        assert lam == pytest.approx(4 * math.log(d) + math.sqrt(6 * math.pi * math.log(d)) + 3)


def test_make_plan_reference_example():
    plan = make_plan(0.1, 1, 1, 1, 2, 16)
    ref = oracle_plan(0.1, 1, 1, 1, 2, 16)
    assert plan.N == ref["N"] == 114
    assert plan.sigma2 == pytest.approx(64)
    assert plan.B == ref["B"] == 115_982
    assert plan.T == plan.N * plan.B
    assert plan.gamma == pytest.approx(0.05)
    assert plan.L == pytest.approx(80)


@settings(max_examples=60, deadline=None)
@given(eps=st.floats(1e-3, 1.0), M=st.floats(0.1, 10), M2=st.floats(0.1, 10), R=st.floats(0.1, 10),
       p=st.sampled_from([1.0, 1.5, 2.0]), d=st.integers(2, 10**5))
def test_make_plan_matches_oracle(eps, M, M2, R, p, d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = make_plan(eps, M, M2, R, p, d)
    ref = oracle_plan(eps, M, M2, R, p, d)
    assert plan.N == ref["N"]
    assert abs(plan.B - ref["B"]) <= 1  # ceil() of a float may flip at an exact integer
    assert plan.T == plan.N * plan.B
    assert plan.kappa == pytest.approx(float(ref["kappa"]), rel=1e-12)
    assert plan.lam == pytest.approx(float(ref["lam"]), rel=1e-12)
    assert plan.gamma == pytest.approx(eps / (2 * M2))
    assert plan.L <= 2 * math.sqrt(d) * M * M2 / eps * (1 + 1e-12)


def test_plan_batch_cap():
    plan = make_plan(0.1, 1, 1, 1, 2, 16, max_batch=1)
    assert plan.B == 1 and plan.T == plan.N
    assert plan.B_theoretical == 115_982
    assert any("capped" in w for w in plan.warnings)
    with pytest.raises(PlanError):
        make_plan(0.1, 1, 1, 1, 2, 16, max_batch=0)


def test_plan_errors():
    for args in ((0, 1, 1, 1, 2, 4), (0.1, -1, 1, 1, 2, 4), (0.1, 1, 1, 0, 2, 4), (0.1, 1, 1, 1, 3, 4)):
        with pytest.raises(PlanError):
            make_plan(*args)


def test_p1_regime_warning():
    with pytest.warns(RuntimeWarning):
        plan = make_plan(10.0, 1, 1, 1, 1, 10**4)
    assert plan.warnings


def test_smoothed_value_examples():
    a = np.array([1.0, -2.0, 0.5])
    x = np.array([0.3, 0.1, -1.0])
    lin = vectorized_oracle(lambda X: X @ a, 3)
    m, se = smoothed_value_mc(lin, x, 0.5, 100_000, SampleStream(0))
    assert abs(m - a @ x) <= 3 * se
    absf = vectorized_oracle(lambda X: np.abs(X[:, 0]), 1)
    m, se = smoothed_value_mc(absf, np.zeros(1), 0.2, 100_000, 1)
    assert abs(m - 0.1) <= 3 * se
    sq = vectorized_oracle(lambda X: 0.5 * np.sum(X**2, axis=1), 2)
    x2 = np.array([1.0, 2.0])
    m, se = smoothed_value_mc(sq, x2, 0.4, 100_000, 2)
    assert abs(m - (2.5 + 0.16 / 4)) <= 3 * se
    with pytest.raises(PlanError):
        smoothed_value_mc(sq, x2, 0.4, 1, 0)


def test_sandwich_norm():
    gamma = 0.1
    f = vectorized_oracle(lambda X: np.linalg.norm(X, axis=1), 4)
    rng = np.random.default_rng(0)
    for i, x in enumerate(rng.standard_normal((20, 4))):
        m, se = smoothed_value_mc(f, x, gamma, 100_000, SampleStream(5, i * 100_000))
        fx = np.linalg.norm(x)
        assert fx - 3 * se <= m <= fx + gamma + 3 * se


def test_smoothed_gradient_lipschitz():
    d, gamma, B = 5, 0.1, 10_000
    f = vectorized_oracle(lambda X: np.abs(X).sum(axis=1), d)
    cfg = EstimatorConfig("central", gamma, B)
    L = math.sqrt(d) * math.sqrt(d) / gamma
    slack = 8 * math.sqrt(d * d / B)
    rng = np.random.default_rng(1)
    for k in range(5):
        x = rng.standard_normal(d) * 0.1
        y = x + rng.standard_normal(d) * 0.02
        gx = batched_gradient(f, x, cfg, SampleStream(2, 2 * k * B)).g
        gy = batched_gradient(f, y, cfg, SampleStream(2, (2 * k + 1) * B)).g
        assert np.linalg.norm(gy - gx) <= L * np.linalg.norm(y - x) + slack


def test_saddle_gammas():
    assert saddle_gammas(0.1, 1, 1) == pytest.approx((0.025, 0.025))
    gx, gy = saddle_gammas(0.1, 1, 2)
    assert (gx, gy) == pytest.approx((0.025, 0.0125))
    for eps, a, b in ((0.3, 2.0, 5.0), (1e-3, 0.1, 7.0)):
        gx, gy = saddle_gammas(eps, a, b)
        assert gx * a + gy * b == pytest.approx(eps / 2)


def test_saddle_cross_lipschitz():
    assert saddle_cross_lipschitz(4, 4, 1, 1, 0.1, 0.1) == pytest.approx((20, 20, 20, 20))
    base = saddle_cross_lipschitz(3, 7, 1.5, 2.0, 0.2, 0.1)
    half = saddle_cross_lipschitz(3, 7, 1.5, 2.0, 0.2, 0.05)
    assert half[0] == base[0] and half[2] == base[2]
    assert half[1] == pytest.approx(2 * base[1]) and half[3] == pytest.approx(2 * base[3])
    Lxx, Lxy, Lyx, Lyy = saddle_cross_lipschitz(1, 100, 1, 1, 1, 1)
    assert Lxy == pytest.approx(10) and Lyx == pytest.approx(1)


def test_plan_report_examples():
    rep = plan_report(0.1, 1, 1, 1, 2, 16)
    assert rep["N"] == make_plan(0.1, 1, 1, 1, 2, 16).N == 114
    for key in ("gamma", "L", "kappa", "lam", "sigma2", "N", "B", "T"):
        assert key in rep
    big = plan_report(0.1, 1, 1, 1, 2, 10**4)
    assert big["kappa_ratio_p2_over_p1"] == pytest.approx(2 / (math.log(1e4) / 1e4))
    assert big["kappa_ratio_p2_over_p1"] == pytest.approx(2172, rel=1e-3)
    assert "N            = 114" in rep["text"]
