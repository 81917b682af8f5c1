import numpy as np
import pytest

from juetrace.density import exact_piecewise
from juetrace.sampler import (KS_99_COEFF, SampleBatch, empirical_cumulants,
                              ks_distance_exact, ks_two_sample,
                              matrix_model_sample, mcmc_sample)


def test_single_eigenvalue_uniform():
    # n = 1, flat weight: c is uniform on (0,1)
    b = mcmc_sample(1, 0.0, 0.0, 40_000, seed=3, burn_in=500)
    assert abs(b.values.mean() - 0.5) < 3 / np.sqrt(12 * len(b.values))
    assert b.values.min() >= 0 and b.values.max() <= 1


def test_mcmc_reproducible():
    a = mcmc_sample(2, 0.5, 1.5, 2000, seed=42, burn_in=200)
    b = mcmc_sample(2, 0.5, 1.5, 2000, seed=42, burn_in=200)
    assert np.array_equal(a.values, b.values)
    c = mcmc_sample(2, 0.5, 1.5, 2000, seed=43, burn_in=200)
    assert not np.array_equal(a.values, c.values)


def test_mcmc_support_bounds():
    b = mcmc_sample(3, -0.5, 2.0, 3000, seed=7, burn_in=300)
    assert b.values.min() >= 0.0 and b.values.max() <= 3.0
    assert 0.05 < b.diagnostics["acceptance_rate"] < 0.99


def test_mcmc_ks_small():
    poly = exact_piecewise(2, 0, 0)
    b = mcmc_sample(2, 0.0, 0.0, 30_000, seed=11, burn_in=2000)
    d = ks_distance_exact(b, poly)
    assert d < KS_99_COEFF / np.sqrt(len(b.values))


def test_matrix_model_ks():
    poly = exact_piecewise(2, 1, 2)
    b = matrix_model_sample(2, 3, 4, 50_000, seed=5)
    assert b.alpha == 1.0 and b.beta == 2.0
    d = ks_distance_exact(b, poly)
    assert d < KS_99_COEFF / np.sqrt(len(b.values))
    assert b.values.min() >= 0 and b.values.max() <= 2


def test_matrix_model_requires_square():
    with pytest.raises(ValueError):
        matrix_model_sample(3, 2, 4, 100, seed=1)


def test_two_oracle_agreement():
    a = mcmc_sample(2, 0.0, 0.0, 30_000, seed=21, burn_in=2000)
    b = matrix_model_sample(2, 2, 2, 30_000, seed=22)
    D, thr = ks_two_sample(a.values, b.values)
    assert D < thr


def test_empirical_cumulants_known_values():
    # thin beyond the default to keep the iid-based jackknife errors honest
    b = mcmc_sample(2, 0.0, 0.0, 60_000, seed=17, burn_in=2000, thin=6)
    kap, se = empirical_cumulants(b, 4)
    assert abs(kap[0] - 1.0) < 3 * se[0]
    assert abs(kap[1] - 1 / 15) < 3 * se[1]


def test_cumulants_permutation_invariant():
    b = mcmc_sample(2, 1.0, 1.0, 5000, seed=9, burn_in=500)
    kap1, _ = empirical_cumulants(b, 4)
    rng = np.random.default_rng(0)
    shuffled = SampleBatch(values=rng.permutation(b.values), n=2, alpha=1.0,
                           beta=1.0, seed=9, method="mcmc")
    kap2, _ = empirical_cumulants(shuffled, 4)
    assert np.allclose(kap1, kap2, rtol=0, atol=1e-12)


def test_cumulants_require_enough_samples():
    b = SampleBatch(values=np.linspace(0.1, 0.9, 100), n=1, alpha=0.0,
                    beta=0.0, seed=0, method="mcmc")
    with pytest.raises(ValueError):
        empirical_cumulants(b)


def test_gaussian_kstat_sanity():
    # k-statistics against a known iid normal sample
    rng = np.random.default_rng(12)
    x = rng.standard_normal(200_000) * 2.0 + 5.0
    b = SampleBatch(values=x, n=1, alpha=0.0, beta=0.0, seed=0, method="mcmc")
    kap, se = empirical_cumulants(b, 4)
    assert abs(kap[0] - 5.0) < 4 * se[0]
    assert abs(kap[1] - 4.0) < 4 * se[1]
    assert abs(kap[2]) < 4 * se[2]
    assert abs(kap[3]) < 4 * se[3]
