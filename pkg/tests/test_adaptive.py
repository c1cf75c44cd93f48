import numpy as np
import pytest

from gmis import (AdaptiveConfig, InputError, ProposalPool, TargetDensity,
                  adaptive_estimates, adaptive_weights, lais_adapt, pmc_adapt,
                  run_adaptive)
from gmis.adaptive import ProposalHistory


class FlatTarget:
    """Test-only improper target with constant log-density."""

    dim = 2

    @staticmethod
    def log_density(x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1])


def make_cfg(**kw):
    base = dict(chains=4, iterations=6, upper_scale=1.0, lower_scale=0.5,
                adapter="lais", weighting="spatial_mixture",
                init_region=[[-4.0, 4.0], [-4.0, 4.0]])
    base.update(kw)
    return AdaptiveConfig(**base)


def two_mode_target():
    pool = ProposalPool.gaussian([[-3.0, 0.0], [3.0, 0.0]], 1.0)
    return TargetDensity.pool_mixture(pool)


class TestConfig:
    def test_validation(self):
        with pytest.raises(InputError):
            make_cfg(chains=0)
        with pytest.raises(InputError):
            make_cfg(lower_scale=0.0)
        with pytest.raises(InputError):
            make_cfg(adapter="smc")
        with pytest.raises(InputError):
            make_cfg(weighting="nope")

    def test_full_mixture_is_cost_gated(self):
        with pytest.raises(InputError):
            make_cfg(weighting="full_mixture")
        cfg = make_cfg(weighting="full_mixture", allow_full_mixture=True)
        assert cfg.weighting == "full_mixture"

    def test_init_region_shape(self):
        with pytest.raises(InputError):
            make_cfg(init_region=[[4.0, -4.0]])


class TestLais:
    def test_zero_step_chains_never_move(self):
        cfg = make_cfg(upper_scale=0.0)
        hist, _ = lais_adapt(cfg, two_mode_target(), np.random.default_rng(0))
        assert hist.means.shape == (6, 4, 2)
        for t in range(6):
            np.testing.assert_array_equal(hist.means[t], hist.means[0])

    def test_flat_target_accepts_everything(self):
        cfg = make_cfg(iterations=20)
        _, rate = lais_adapt(cfg, FlatTarget(), np.random.default_rng(1))
        assert rate == 1.0

    def test_chains_find_both_modes(self):
        cfg = make_cfg(chains=20, iterations=100, upper_scale=3.0)
        hist, rate = lais_adapt(cfg, two_mode_target(),
                                np.random.default_rng(2))
        finals = hist.means[-1]
        assert 0.0 < rate < 1.0
        for mode in (np.array([-3.0, 0.0]), np.array([3.0, 0.0])):
            dists = np.linalg.norm(finals - mode, axis=1)
            assert dists.min() < 3.0


class TestPmc:
    def test_shapes_and_diagnostics(self):
        cfg = make_cfg(adapter="pmc")
        result = pmc_adapt(cfg, two_mode_target(), np.random.default_rng(3))
        assert result.samples.shape == (6, 4, 2)
        assert result.log_weights.shape == (6, 4)
        ess = result.diagnostics["ess_proxy"]
        assert ess.shape == (6,) and np.all(ess >= 1.0) and np.all(ess <= 4.0)

    def test_single_particle_ess_is_one(self):
        cfg = make_cfg(adapter="pmc", chains=1)
        result = pmc_adapt(cfg, two_mode_target(), np.random.default_rng(4))
        np.testing.assert_array_equal(result.diagnostics["ess_proxy"],
                                      np.ones(6))

    def test_rejects_temporal_weighting(self):
        cfg = make_cfg(adapter="pmc", weighting="temporal_mixture")
        with pytest.raises(InputError):
            pmc_adapt(cfg, two_mode_target(), np.random.default_rng(0))


class TestWeightVariants:
    def setup_method(self):
        rng = np.random.default_rng(5)
        self.target = two_mode_target()
        self.means = rng.normal(size=(3, 4, 2), scale=2.0)
        self.x = self.means + 0.5 * rng.standard_normal((3, 4, 2))
        self.hist = ProposalHistory(self.means)

    def test_spatial_invariant_to_chain_permutation(self):
        lw = adaptive_weights(self.hist, self.x, "spatial_mixture",
                              self.target, 0.5)
        perm = np.array([2, 0, 3, 1])
        lw_p = adaptive_weights(ProposalHistory(self.means[:, perm]),
                                self.x[:, perm], "spatial_mixture",
                                self.target, 0.5)
        np.testing.assert_allclose(lw[:, perm], lw_p, rtol=1e-12)

    def test_full_mixture_depends_only_on_x(self):
        x = self.x.copy()
        x[1, 2] = x[0, 0]
        lw = adaptive_weights(self.hist, x, "full_mixture", self.target, 0.5)
        assert lw[1, 2] == pytest.approx(lw[0, 0], rel=1e-12)

    def test_single_chain_spatial_equals_per_proposal(self):
        means, x = self.means[:, :1], self.x[:, :1]
        a = adaptive_weights(ProposalHistory(means), x, "spatial_mixture",
                             self.target, 0.5)
        b = adaptive_weights(ProposalHistory(means), x, "per_proposal",
                             self.target, 0.5)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_single_iteration_collapse_identities(self):
        means, x = self.means[:1], self.x[:1]
        hist = ProposalHistory(means)
        np.testing.assert_allclose(
            adaptive_weights(hist, x, "temporal_mixture", self.target, 0.5),
            adaptive_weights(hist, x, "per_proposal", self.target, 0.5),
            rtol=1e-12)
        np.testing.assert_allclose(
            adaptive_weights(hist, x, "full_mixture", self.target, 0.5),
            adaptive_weights(hist, x, "spatial_mixture", self.target, 0.5),
            rtol=1e-12)

    def test_partition_endpoints(self):
        T, J = 3, 4
        full_group = [[(j, t) for j in range(1, J + 1)
                       for t in range(1, T + 1)]]
        np.testing.assert_allclose(
            adaptive_weights(self.hist, self.x, "partition", self.target, 0.5,
                             partition=full_group),
            adaptive_weights(self.hist, self.x, "full_mixture", self.target,
                             0.5),
            rtol=1e-12)
        singletons = [[(j, t)] for j in range(1, J + 1)
                      for t in range(1, T + 1)]
        np.testing.assert_allclose(
            adaptive_weights(self.hist, self.x, "partition", self.target, 0.5,
                             partition=singletons),
            adaptive_weights(self.hist, self.x, "per_proposal", self.target,
                             0.5),
            rtol=1e-12)

    def test_partition_must_cover_grid(self):
        with pytest.raises(InputError):
            adaptive_weights(self.hist, self.x, "partition", self.target, 0.5,
                             partition=[[(1, 1)]])
        overlap = [[(1, 1)], [(1, 1)]]
        with pytest.raises(InputError):
            adaptive_weights(self.hist, self.x, "partition", self.target, 0.5,
                             partition=overlap)


class TestRunAdaptive:
    def test_lais_end_to_end(self):
        cfg = make_cfg()
        result = run_adaptive(cfg, two_mode_target(), np.random.default_rng(6))
        assert result.samples.shape == (6, 4, 2)
        assert "acceptance_rate" in result.diagnostics
        est = adaptive_estimates(result)
        assert np.isfinite(est["z"]) and np.isfinite(est["self"]).all()

    def test_dimension_mismatch_rejected(self):
        cfg = make_cfg(init_region=[[-1.0, 1.0]])
        with pytest.raises(InputError):
            run_adaptive(cfg, two_mode_target(), np.random.default_rng(0))

    def test_matched_estimates_are_reasonable(self):
        cfg = make_cfg(chains=20, iterations=40, upper_scale=3.0)
        result = run_adaptive(cfg, two_mode_target(), np.random.default_rng(7))
        est = adaptive_estimates(result)
        assert 0.3 < est["z"] < 3.0
        assert np.linalg.norm(est["self"]) < 3.0
