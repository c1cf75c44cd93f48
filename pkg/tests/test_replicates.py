import numpy as np
import pytest

from gmis import (IndexSequence, Partition, ProposalPool, SamplingMode,
                  SchemeSpec, TargetDensity, WeightingOption,
                  denominator_subset, simulate_direct_means,
                  simulate_estimates, simulate_partition_estimates)
from gmis.replicates import _draw_indexes, _log_denominator


def reference_denominators(option, mode, j, pool, x):
    """Per-sample denominators via the scalar multiset path."""
    R, k, N = j.shape
    out = np.empty((R, k, N))
    for r in range(R):
        for b in range(k):
            seq = IndexSequence(mode, tuple(int(i) + 1 for i in j[r, b]))
            for n in range(1, N + 1):
                subset = denominator_subset(option, mode, n, seq, N)
                out[r, b, n - 1] = pool.log_mixture_eval(subset, x[r, b, n - 1])
    return out


class TestDenominatorEngine:
    @pytest.mark.parametrize("mode", list(SamplingMode))
    @pytest.mark.parametrize("option", list(WeightingOption))
    def test_matches_scalar_reference(self, mode, option):
        N, R, k = 4, 6, 3
        pool = ProposalPool.gaussian([[-3.0], [-1.0], [1.0], [3.0]], 1.0)
        seed = int.from_bytes((mode.value + option.value).encode(), "little")
        rng = np.random.default_rng(seed)
        j = _draw_indexes(mode, (R, k, N), N, rng)
        x = pool.draw_indexed(j + 1, rng)
        logq = pool.log_eval_matrix(x)
        got = _log_denominator(option, mode, j, logq)
        want = reference_denominators(option, mode, j, pool, x)
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


class TestSimulateEstimates:
    def test_matched_n3_is_exact_every_replicate(self):
        pool = ProposalPool.gaussian([[-2.0], [0.0], [2.0]], 1.0)
        target = TargetDensity.pool_mixture(pool)
        sims = simulate_estimates(SchemeSpec.from_name("N3", 2), target, pool,
                                  replicates=50,
                                  rng=np.random.default_rng(0))
        assert np.all(sims["z"] == 1.0)

    def test_chunking_does_not_change_results(self):
        pool = ProposalPool.gaussian([[-1.0], [1.0]], 1.0)
        target = TargetDensity.pool_mixture(pool)
        spec = SchemeSpec.from_name("R2", 2)
        a = simulate_estimates(spec, target, pool, replicates=300,
                               rng=np.random.default_rng(4), chunk=300)
        b = simulate_estimates(spec, target, pool, replicates=300,
                               rng=np.random.default_rng(4), chunk=7)
        for key in ("z", "mean", "self"):
            np.testing.assert_array_equal(a[key], b[key])

    def test_mean_estimator_is_unbiased_statistically(self):
        pool = ProposalPool.gaussian([[-1.0], [1.0]], 1.0)
        target = TargetDensity.pool_mixture(pool)
        sims = simulate_estimates(SchemeSpec.from_name("N2", 1), target, pool,
                                  replicates=40000,
                                  rng=np.random.default_rng(7))
        est = sims["mean"][:, 0]
        stderr = est.std(ddof=1) / np.sqrt(est.shape[0])
        assert abs(est.mean()) < 4 * stderr


class TestPartitionEngine:
    def test_endpoints_reproduce_named_schemes(self):
        pool = ProposalPool.gaussian([[-3.0], [-1.0], [1.0], [3.0]], 1.0)
        target = TargetDensity.pool_mixture(pool)
        seed = 13
        full = simulate_partition_estimates(
            Partition(((1, 2, 3, 4),)), target, pool, replicates=100,
            rng=np.random.default_rng(seed))
        n3 = simulate_estimates(SchemeSpec.from_name("N3"), target, pool,
                                replicates=100,
                                rng=np.random.default_rng(seed))
        np.testing.assert_array_equal(full["self"], n3["self"])
        singles = simulate_partition_estimates(
            Partition(((1,), (2,), (3,), (4,))), target, pool, replicates=100,
            rng=np.random.default_rng(seed))
        n1 = simulate_estimates(SchemeSpec.from_name("N1"), target, pool,
                                replicates=100,
                                rng=np.random.default_rng(seed))
        np.testing.assert_array_equal(singles["self"], n1["self"])

    def test_unequal_subset_sizes_accepted(self):
        pool = ProposalPool.gaussian([[-2.0], [0.0], [2.0]], 1.0)
        target = TargetDensity.pool_mixture(pool)
        sims = simulate_partition_estimates(
            Partition(((1, 2), (3,))), target, pool, replicates=20,
            rng=np.random.default_rng(2))
        assert np.isfinite(sims["z"]).all()


def test_direct_means_match_target_mean():
    pool = ProposalPool.gaussian([[-1.0], [3.0]], 1.0)
    target = TargetDensity.pool_mixture(pool)
    means = simulate_direct_means(target, 64, 2000, np.random.default_rng(0))
    assert means.shape == (2000, 1)
    stderr = means.std(ddof=1) / np.sqrt(2000)
    assert abs(means.mean() - 1.0) < 4 * stderr
