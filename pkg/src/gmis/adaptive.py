"""Adaptive importance sampling on top of the MIS weighting variants.

Two adapters move the proposal locations over a J x T space-time grid:

* chain adaptation ("lais"): J independent random-walk Metropolis
  chains on the target form the upper layer; their states become the
  means of the lower-layer IS proposals,
* resampling adaptation ("pmc"): each iteration draws one sample per
  proposal, weights it, and multinomially resamples the next
  generation of proposal means.

The weight denominator for sample (j, t) can be the sample's own
proposal, the spatial mixture at iteration t, the temporal mixture of
chain j, the full space-time mixture, or a generic disjoint grouping of
grid cells. The full mixture costs O((JT)^2) evaluations and must be
enabled explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import InputError

_LOG_2PI = np.log(2.0 * np.pi)

WEIGHTING_VARIANTS = ("per_proposal", "spatial_mixture", "temporal_mixture",
                      "full_mixture", "partition")


@dataclass(frozen=True)
class AdaptiveConfig:
    chains: int                      # proposals per iteration (J)
    iterations: int                  # adaptation steps (T)
    upper_scale: float               # MH random-walk std
    lower_scale: float               # IS proposal std
    adapter: str = "lais"            # "lais" | "pmc"
    weighting: str = "spatial_mixture"
    init_region: np.ndarray = None   # (d, 2) low/high per dimension
    allow_full_mixture: bool = False
    partition: Optional[tuple] = None  # groups of (chain, iteration) pairs

    def __post_init__(self):
        if self.chains < 1 or self.iterations < 1:
            raise InputError("chains and iterations must be >= 1")
        if self.upper_scale < 0 or self.lower_scale <= 0:
            raise InputError("scales must be positive")
        if self.adapter not in ("lais", "pmc"):
            raise InputError(f"unknown adapter {self.adapter!r}")
        if self.weighting not in WEIGHTING_VARIANTS:
            raise InputError(f"unknown weighting variant {self.weighting!r}")
        if self.weighting == "full_mixture" and not self.allow_full_mixture:
            raise InputError(
                "full space-time mixture weighting costs O((J*T)^2) proposal "
                "evaluations; set allow_full_mixture=True to confirm")
        region = np.atleast_2d(np.asarray(self.init_region, dtype=float))
        if region.shape[1] != 2 or np.any(region[:, 0] > region[:, 1]):
            raise InputError("init_region must be rows of (low, high)")
        object.__setattr__(self, "init_region", region)

    @property
    def dim(self) -> int:
        return self.init_region.shape[0]


@dataclass
class ProposalHistory:
    """The J x T grid of adapted proposal means."""

    means: np.ndarray  # (T, J, d)


@dataclass
class AdaptiveResult:
    history: ProposalHistory
    samples: np.ndarray       # (T, J, d)
    log_weights: np.ndarray   # (T, J)
    diagnostics: dict = field(default_factory=dict)


def _iso_logpdf(x, means, scale):
    """Isotropic Gaussian log-density; broadcasts over leading axes."""
    d = x.shape[-1]
    z2 = np.sum((x - means) ** 2, axis=-1) / scale ** 2
    return -0.5 * z2 - d * (0.5 * _LOG_2PI + np.log(scale))


def _init_means(cfg: AdaptiveConfig, rng) -> np.ndarray:
    low, high = cfg.init_region[:, 0], cfg.init_region[:, 1]
    return rng.uniform(low, high, size=(cfg.chains, cfg.dim))


def lais_adapt(cfg: AdaptiveConfig, target, rng) -> tuple:
    """Run J parallel random-walk Metropolis chains on the target.

    No burn-in is discarded; the state after each step becomes that
    iteration's proposal mean. Returns (history, acceptance_rate).
    """
    if cfg.adapter != "lais":
        raise InputError("config adapter is not 'lais'")
    state = _init_means(cfg, rng)
    logp = np.asarray(target.log_density(state))
    means = np.empty((cfg.iterations, cfg.chains, cfg.dim))
    accepted = 0
    for t in range(cfg.iterations):
        prop = state + cfg.upper_scale * rng.standard_normal(state.shape)
        logp_prop = np.asarray(target.log_density(prop))
        accept = np.log(rng.random(cfg.chains)) < logp_prop - logp
        state = np.where(accept[:, None], prop, state)
        logp = np.where(accept, logp_prop, logp)
        accepted += int(np.sum(accept))
        means[t] = state
    rate = accepted / (cfg.iterations * cfg.chains)
    return ProposalHistory(means), rate


def pmc_adapt(cfg: AdaptiveConfig, target, rng) -> AdaptiveResult:
    """Resampling adaptation: one sample per proposal per iteration,
    weights per the configured variant (own proposal or the spatial
    mixture), then multinomial resampling of the next means."""
    if cfg.adapter != "pmc":
        raise InputError("config adapter is not 'pmc'")
    if cfg.weighting not in ("per_proposal", "spatial_mixture"):
        raise InputError("resampling adaptation supports per_proposal or "
                         "spatial_mixture weighting")
    J, T, d = cfg.chains, cfg.iterations, cfg.dim
    means = np.empty((T, J, d))
    samples = np.empty((T, J, d))
    log_w = np.empty((T, J))
    ess = np.empty(T)
    state = _init_means(cfg, rng)
    for t in range(T):
        means[t] = state
        x = state + cfg.lower_scale * rng.standard_normal((J, d))
        log_pi = np.asarray(target.log_density(x))
        if cfg.weighting == "per_proposal":
            log_den = _iso_logpdf(x, state, cfg.lower_scale)
        else:
            cross = _iso_logpdf(x[:, None, :], state[None, :, :], cfg.lower_scale)
            log_den = logsumexp(cross, axis=1) - np.log(J)
        lw = log_pi - log_den
        samples[t], log_w[t] = x, lw
        shifted = np.exp(lw - np.max(lw))
        ess[t] = np.sum(shifted) / np.max(shifted)
        probs = shifted / np.sum(shifted)
        state = x[rng.choice(J, size=J, p=probs)]
    hist = ProposalHistory(means)
    return AdaptiveResult(hist, samples, log_w, {"ess_proxy": ess})


def adaptive_weights(history: ProposalHistory, samples, variant: str,
                     target, lower_scale: float,
                     partition=None) -> np.ndarray:
    """Log-weights for the (T, J) grid of samples under one variant."""
    means = history.means
    x = np.asarray(samples, dtype=float)
    if x.shape != means.shape:
        raise InputError("samples must match the proposal grid shape")
    T, J, d = means.shape
    log_pi = np.asarray(target.log_density(x))
    if variant == "per_proposal":
        log_den = _iso_logpdf(x, means, lower_scale)
    elif variant == "spatial_mixture":
        cross = _iso_logpdf(x[:, :, None, :], means[:, None, :, :], lower_scale)
        log_den = logsumexp(cross, axis=2) - np.log(J)
    elif variant == "temporal_mixture":
        mj = means.transpose(1, 0, 2)                       # (J, T, d)
        cross = _iso_logpdf(x.transpose(1, 0, 2)[:, :, None, :],
                            mj[:, None, :, :], lower_scale)  # (J, T, T)
        log_den = (logsumexp(cross, axis=2) - np.log(T)).transpose(1, 0)
    elif variant == "full_mixture":
        flat = means.reshape(T * J, d)
        cross = _iso_logpdf(x.reshape(T * J, 1, d), flat[None, :, :], lower_scale)
        log_den = (logsumexp(cross, axis=1) - np.log(T * J)).reshape(T, J)
    elif variant == "partition":
        if partition is None:
            raise InputError("partition variant needs a grouping")
        covered = np.zeros((T, J), dtype=bool)
        log_den = np.empty((T, J))
        for group in partition:
            cells = [(int(t) - 1, int(j) - 1) for j, t in group]
            for t, j in cells:
                if not (0 <= t < T and 0 <= j < J) or covered[t, j]:
                    raise InputError("partition must be disjoint cells of the grid")
                covered[t, j] = True
            gm = np.stack([means[t, j] for t, j in cells])    # (L, d)
            for t, j in cells:
                cross = _iso_logpdf(x[t, j], gm, lower_scale)
                log_den[t, j] = logsumexp(cross) - np.log(len(cells))
        if not covered.all():
            raise InputError("partition does not cover the proposal grid")
    else:
        raise InputError(f"unknown weighting variant {variant!r}")
    return log_pi - log_den


def run_adaptive(cfg: AdaptiveConfig, target, rng) -> AdaptiveResult:
    """Full adaptive run: adapt proposal means, draw one sample per grid
    cell, and weight per the configured variant."""
    if target.dim != cfg.dim:
        raise InputError("init_region dimension must match the target")
    if cfg.adapter == "pmc":
        return pmc_adapt(cfg, target, rng)
    history, rate = lais_adapt(cfg, target, rng)
    samples = history.means + cfg.lower_scale * rng.standard_normal(history.means.shape)
    lw = adaptive_weights(history, samples, cfg.weighting, target,
                          cfg.lower_scale, cfg.partition)
    shifted = np.exp(lw - np.max(lw))
    diag = {"acceptance_rate": rate,
            "ess_proxy": np.array([np.sum(shifted) / np.max(shifted)])}
    return AdaptiveResult(history, samples, lw, diag)


def adaptive_estimates(result: AdaptiveResult, g=None) -> dict:
    """Normalizing-constant and self-normalized mean estimates from one
    adaptive run."""
    lw = result.log_weights.reshape(-1)
    x = result.samples.reshape(-1, result.samples.shape[-1])
    shift = np.max(lw)
    w = np.exp(lw - shift)
    gx = x if g is None else np.asarray(g(x), dtype=float)
    zhat = float(np.exp(shift) * np.mean(w))
    self_norm = (w @ gx) / np.sum(w)
    return {"z": zhat, "self": self_norm}
