import math

import numpy as np
import pytest
from scipy import stats

from dpgs.estimators import EstimatorConfig, stable_cov, stable_mean
from dpgs.exceptions import ShapeMismatch, SubsetTooLarge
from dpgs.linalg import sym_sqrt
from dpgs.privacy import PrivacyParams, PtrOutcome, plan
from dpgs.randomness import RngStream
from dpgs.samplers import cov_aware_mean, sample_known_cov, sample_unbounded

PLAN = plan(0.2, PrivacyParams(1.0, 0.05), 1)
PLAN2 = plan(0.2, PrivacyParams(1.0, 0.05), 2)


def gaussian_data(gen, n, mu, sigma_root):
    d = len(mu)
    return gen.standard_normal((n, d)) @ np.asarray(sigma_root).T + np.asarray(mu)


def test_shape_mismatch_rejected():
    with pytest.raises(ShapeMismatch):
        sample_unbounded(np.zeros((10, 1)), PLAN, RngStream(0))
    with pytest.raises(ShapeMismatch):
        sample_unbounded(np.zeros((PLAN.n, 2)), PLAN, RngStream(0))
    with pytest.raises(ShapeMismatch):
        sample_known_cov(np.zeros((PLAN.n1 + 1, 1)), PLAN, RngStream(0))


def test_unbounded_deterministic_replay():
    gen = np.random.default_rng(100)
    x = gaussian_data(gen, PLAN.n, [3.0], [[math.sqrt(2.0)]])
    r1, t1 = sample_unbounded(x, PLAN, RngStream(7, 1))
    r2, t2 = sample_unbounded(x, PLAN, RngStream(7, 1))
    assert np.array_equal(r1.value, r2.value)
    assert t1.to_dict() == t2.to_dict()


def test_unbounded_clean_data_flags():
    gen = np.random.default_rng(101)
    x = gaussian_data(gen, PLAN.n, [3.0], [[math.sqrt(2.0)]])
    res, trace = sample_unbounded(x, PLAN, RngStream(11))
    assert trace.score_cov == 0 and trace.score_mean == 0
    assert trace.cov_uniform and trace.mean_uniform
    assert trace.ptr is PtrOutcome.PASS
    assert res.value is not None and res.value.shape == (1,)
    assert trace.reference_set.size == PLAN.ref_size
    assert trace.reference_set.max() < PLAN.n1


def test_failed_iff_gate_failed():
    gen = np.random.default_rng(102)
    x = gaussian_data(gen, PLAN.n, [0.0], [[1.0]])
    # corrupt covariance rows with staggered magnitudes so the subset filter
    # peels them one at a time, putting the score near the gate midpoint
    x[PLAN.n1 : PLAN.n1 + 16, 0] = 10.0 ** (4.0 + np.arange(16))
    seen = set()
    for seed in range(40):
        res, trace = sample_unbounded(x, PLAN, RngStream(seed))
        assert res.failed == (trace.ptr is PtrOutcome.FAIL)
        assert (res.value is None) == res.failed
        seen.add(trace.ptr)
    assert seen == {PtrOutcome.PASS, PtrOutcome.FAIL}


def test_adjacent_runs_couple_reference_and_output():
    # one mean-block row changes; under a shared stream the reference set,
    # gate noise and sphere point all replay, so the outputs differ exactly
    # by the difference of the weighted means
    gen = np.random.default_rng(103)
    x = gaussian_data(gen, PLAN.n, [1.0], [[1.0]])
    x2 = x.copy()
    x2[5, 0] += 0.5
    stream = RngStream(13)
    r1, t1 = sample_unbounded(x, PLAN, stream)
    r2, t2 = sample_unbounded(x2, PLAN, stream)
    assert np.array_equal(t1.reference_set, t2.reference_set)
    assert t1.ptr is PtrOutcome.PASS and t2.ptr is PtrOutcome.PASS

    cfg = EstimatorConfig(PLAN.lambda0, PLAN.k)
    mus = []
    for data in (x, x2):
        cov_out = stable_cov(data[PLAN.n1 :], cfg)
        mean_out = stable_mean(data[: PLAN.n1], cov_out.covariance(), cfg, t1.reference_set)
        mus.append(mean_out.weights @ data[: PLAN.n1])
    assert np.allclose(r1.value - r2.value, mus[0] - mus[1], atol=1e-12)


def test_unbounded_pass_rate_meets_target():
    gen = np.random.default_rng(104)
    fails = 0
    trials = 300
    for i in range(trials):
        x = gaussian_data(gen, PLAN.n, [-2.0], [[3.0]])
        res, _ = sample_unbounded(x, PLAN, RngStream(1000, i))
        fails += res.failed
    assert fails / trials <= 0.2 + 0.05


def test_unbounded_output_law_univariate():
    # with uniform weights the output is an exact draw from the source law;
    # fresh data each run, so the collected outputs should pass a KS test
    mu, sigma = 3.0, math.sqrt(2.0)
    gen = np.random.default_rng(105)
    outs = []
    for i in range(1200):
        x = gaussian_data(gen, PLAN.n, [mu], [[sigma]])
        res, trace = sample_unbounded(x, PLAN, RngStream(2000, i))
        if res.value is not None and trace.cov_uniform and trace.mean_uniform:
            outs.append(res.value[0])
    assert len(outs) >= 1100
    ks = stats.kstest(np.array(outs), stats.norm(loc=mu, scale=sigma).cdf)
    assert ks.pvalue >= 1e-3


def test_unbounded_bivariate_shapes_and_law():
    mu = np.array([1.0, -1.0])
    root = np.array([[1.0, 0.0], [0.6, 0.8]])
    gen = np.random.default_rng(106)
    outs = []
    for i in range(400):
        x = gaussian_data(gen, PLAN2.n, mu, root)
        res, _ = sample_unbounded(x, PLAN2, RngStream(3000, i))
        if res.value is not None:
            outs.append(res.value)
    outs = np.array(outs)
    assert outs.shape[1] == 2
    assert np.allclose(outs.mean(axis=0), mu, atol=0.25)
    emp = np.cov(outs.T)
    assert np.allclose(emp, root @ root.T, atol=0.35)


def test_known_cov_deterministic_and_flags():
    gen = np.random.default_rng(107)
    x = gen.standard_normal((PLAN.n1, 1)) + 4.0
    r1, t1 = sample_known_cov(x, PLAN, RngStream(17))
    r2, t2 = sample_known_cov(x, PLAN, RngStream(17))
    assert np.array_equal(r1.value, r2.value)
    assert t1.score_cov is None and t1.cov_uniform is None
    assert t1.mean_uniform and t1.score_mean == 0
    assert t2.ptr is PtrOutcome.PASS


def test_known_cov_output_law_tv():
    # successful outputs against fresh draws from the true law: the binned
    # total variation estimate stays within the failure budget
    from dpgs.divergences import tv_histogram

    mu = -2.0
    gen = np.random.default_rng(108)
    outs = []
    i = 0
    while len(outs) < 50_000:
        x = gen.standard_normal((PLAN.n1, 1)) + mu
        res, _ = sample_known_cov(x, PLAN, RngStream(4000, i))
        i += 1
        if res.value is not None:
            outs.append(res.value[0])
    fresh = gen.standard_normal(50_000) + mu
    est = tv_histogram(np.array(outs), fresh, rng=RngStream(4001))
    assert est.tv <= 0.2 + 3.0 * est.boot_sigma


def test_cov_aware_mean_near_degenerate_recovers_center():
    mu0 = np.array([0.5, -1.25])
    gen = np.random.default_rng(109)
    x = mu0 + 1e-9 * gen.standard_normal((400, 2))
    res, trace = cov_aware_mean(x, PrivacyParams(1.0, 0.1), 1e6, RngStream(19))
    assert trace.score_cov == 0 and trace.score_mean == 0
    assert trace.ptr is PtrOutcome.PASS
    assert np.allclose(res.value, mu0, atol=1e-4)


def test_cov_aware_mean_exactly_degenerate_fails_gate():
    # identical rows make every pairing difference zero, the subset filter
    # empties out and the covariance score hits its ceiling, which the gate
    # rejects deterministically
    x = np.tile([[0.5, -1.25]], (400, 1))
    params = PrivacyParams(1.0, 0.1)
    res, trace = cov_aware_mean(x, params, 1e6, RngStream(19))
    assert trace.score_cov == trace.sizes["k"]
    assert res.failed


def test_zero_covariance_noise_is_exact():
    # the output formula collapses to the weighted mean when sigma_hat = 0
    gen = np.random.default_rng(110)
    mu_hat = np.array([0.5, -1.25])
    g = gen.standard_normal(2)
    value = mu_hat + math.sqrt(5.0) * (sym_sqrt(np.zeros((2, 2))) @ g)
    assert np.array_equal(value, mu_hat)


def test_cov_aware_mean_gaussian_accuracy():
    mu = np.array([10.0, -3.0])
    gen = np.random.default_rng(111)
    x = gaussian_data(gen, 1000, mu, np.eye(2))
    params = PrivacyParams(1.0, 0.05)
    lam0 = 60.0
    res, trace = cov_aware_mean(x, params, lam0, RngStream(23))
    assert trace.ptr is PtrOutcome.PASS
    assert trace.score_cov == 0 and trace.score_mean == 0
    # noise scale c is about 1.32 at these sizes, so 6 is a >4 sigma margin
    assert np.linalg.norm(res.value - mu) <= 6.0


def test_cov_aware_mean_split_block():
    gen = np.random.default_rng(112)
    x = gaussian_data(gen, 1200, [0.0], [[1.0]])
    res, trace = cov_aware_mean(x, PrivacyParams(1.0, 0.05), 60.0, RngStream(29), split_n1=600)
    assert trace.sizes["n"] == 1200
    assert trace.reference_set.max() < 600
    with pytest.raises(ShapeMismatch):
        cov_aware_mean(x, PrivacyParams(1.0, 0.05), 60.0, RngStream(29), split_n1=599)
    with pytest.raises(ShapeMismatch):
        cov_aware_mean(x, PrivacyParams(1.0, 0.05), 60.0, RngStream(29), split_n1=1200)


def test_cov_aware_mean_reference_floor():
    x = np.zeros((80, 1))
    with pytest.raises(SubsetTooLarge):
        cov_aware_mean(x, PrivacyParams(1.0, 0.05), 10.0, RngStream(0))
