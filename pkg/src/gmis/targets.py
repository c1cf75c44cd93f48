"""Target distributions with log-density evaluation and analytic moments.

Three built-in families are provided:

* equal- or arbitrary-weight Gaussian mixtures (full covariances),
* mixtures of generalized Gaussian distributions (GGD) that factorize
  across dimensions,
* the banana-shaped bent Gaussian.

All densities are normalized (Z = 1) and evaluated in log-space; mixture
components are combined with log-sum-exp so tail evaluations never
overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DimensionMismatchError, InputError, UnsupportedQueryError

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class GaussianMixtureParams:
    """Mixture of K Gaussians in d dimensions.

    weights must sum to 1; every covariance must be symmetric positive
    definite (checked by attempting a Cholesky factorization, which is
    then reused for every evaluation).
    """

    weights: np.ndarray      # (K,)
    means: np.ndarray        # (K, d)
    covariances: np.ndarray  # (K, d, d)
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.atleast_2d(np.asarray(self.means, dtype=float))
        c = np.asarray(self.covariances, dtype=float)
        if c.ndim == 2:  # list of variances for 1-D components
            c = c.reshape(c.shape[0], 1, 1)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InputError("mixture weights must be nonnegative and sum to 1")
        if m.shape[0] != w.shape[0] or c.shape[0] != w.shape[0]:
            raise InputError("weights, means and covariances must agree in length")
        if c.shape[1:] != (m.shape[1], m.shape[1]):
            raise DimensionMismatchError("covariance shape does not match mean dimension")
        try:
            chol = np.linalg.cholesky(c)
        except np.linalg.LinAlgError as exc:
            raise InputError("covariance matrices must be positive definite") from exc
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "covariances", c)
        object.__setattr__(self, "_chol", chol)

    @property
    def dim(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class GGDMixtureParams:
    """Equal-weight mixture of K generalized Gaussian components.

    Each component factorizes across dimensions with per-dimension
    location mu, scale alpha > 0 and shape beta > 0 (beta = 2 recovers a
    Gaussian with sigma = alpha / sqrt(2), beta = 1 a Laplacian).
    """

    mu: np.ndarray     # (K, d)
    alpha: np.ndarray  # (K, d)
    beta: np.ndarray   # (K, d)

    def __post_init__(self):
        mu = np.atleast_2d(np.asarray(self.mu, dtype=float))
        al = np.broadcast_to(np.asarray(self.alpha, dtype=float), mu.shape).copy()
        be = np.broadcast_to(np.asarray(self.beta, dtype=float), mu.shape).copy()
        if np.any(al <= 0) or np.any(be <= 0):
            raise InputError("GGD scale and shape parameters must be strictly positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "alpha", al)
        object.__setattr__(self, "beta", be)

    @property
    def dim(self) -> int:
        return self.mu.shape[1]

    def log_norm_const(self) -> np.ndarray:
        """Per-component log normalizing constant, computed via log-gamma."""
        return np.sum(
            np.log(self.beta) - np.log(2.0 * self.alpha) - gammaln(1.0 / self.beta),
            axis=1,
        )


@dataclass(frozen=True)
class BananaParams:
    """Bent Gaussian: standard normal product with the second coordinate
    shifted by b * (x1^2 - sigma2)."""

    sigma2: float = 4.0
    b: float = 3.0
    dim: int = 2

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise InputError("sigma2 must be positive")
        if self.dim < 2:
            raise InputError("banana target needs dim >= 2")


class TargetDensity:
    """Evaluable log-density with optional exact moments.

    Construct through one of the classmethod factories. Instances are
    immutable and safe to share across workers.
    """

    def __init__(self, kind, params, dim, known_Z=None, ground_truth_mean=None):
        if known_Z is not None and known_Z <= 0:
            raise InputError("known_Z must be strictly positive")
        if ground_truth_mean is not None:
            ground_truth_mean = np.asarray(ground_truth_mean, dtype=float)
            if ground_truth_mean.shape != (dim,):
                raise DimensionMismatchError("ground_truth_mean length must equal dim")
        self.kind = kind
        self.params = params
        self.dim = dim
        self.known_Z = known_Z
        self.ground_truth_mean = ground_truth_mean

    # -- factories ---------------------------------------------------------

    @classmethod
    def gaussian_mixture(cls, weights, means, covariances) -> "TargetDensity":
        p = GaussianMixtureParams(weights, means, covariances)
        mean = p.weights @ p.means
        return cls("gaussian_mixture", p, p.dim, known_Z=1.0, ground_truth_mean=mean)

    @classmethod
    def ggd_mixture(cls, mu, alpha, beta) -> "TargetDensity":
        p = GGDMixtureParams(mu, alpha, beta)
        # components are symmetric about mu, so the mixture mean is the
        # equal-weight average of the component locations
        mean = p.mu.mean(axis=0)
        return cls("ggd_mixture", p, p.dim, known_Z=1.0, ground_truth_mean=mean)

    @classmethod
    def pool_mixture(cls, pool) -> "TargetDensity":
        """Matched target: exactly the equal-weight mixture of a proposal
        pool (pi = psi by construction, sharing the pool's evaluation
        path bit for bit)."""
        locations = np.stack([p.location for p in pool.proposals])
        return cls("pool_mixture", pool, pool.dim, known_Z=1.0,
                   ground_truth_mean=locations.mean(axis=0))

    @classmethod
    def banana(cls, sigma2=4.0, b=3.0, dim=2) -> "TargetDensity":
        p = BananaParams(float(sigma2), float(b), int(dim))
        return cls("banana", p, p.dim, known_Z=1.0,
                   ground_truth_mean=np.zeros(p.dim))

    # -- evaluation --------------------------------------------------------

    def log_density(self, x) -> np.ndarray:
        """log pi(x) for a single point (d,) or a batch (..., d)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 1
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"expected points of dimension {self.dim}, got {x.shape[-1]}")
        x2 = x.reshape(-1, self.dim)
        if self.kind == "gaussian_mixture":
            out = self._gm_logpdf(x2)
        elif self.kind == "ggd_mixture":
            out = self._ggd_logpdf(x2)
        elif self.kind == "pool_mixture":
            out = np.asarray(self.params.log_mixture_all(x2))
        else:
            out = self._banana_logpdf(x2)
        out = out.reshape(x.shape[:-1])
        return float(out) if scalar else out

    def _gm_logpdf(self, x):
        p: GaussianMixtureParams = self.params
        comp = np.empty((x.shape[0], p.weights.shape[0]))
        for k in range(p.weights.shape[0]):
            diff = x - p.means[k]
            y = np.linalg.solve(p._chol[k], diff.T).T
            logdet = np.sum(np.log(np.diagonal(p._chol[k])))
            comp[:, k] = (-0.5 * np.sum(y * y, axis=1)
                          - logdet - 0.5 * self.dim * _LOG_2PI)
        return logsumexp(comp, axis=1, b=p.weights[None, :])

    def _ggd_logpdf(self, x):
        p: GGDMixtureParams = self.params
        lognorm = p.log_norm_const()  # (K,)
        # (m, K, d) broadcast
        z = np.abs(x[:, None, :] - p.mu[None, :, :]) / p.alpha[None, :, :]
        comp = lognorm[None, :] - np.sum(z ** p.beta[None, :, :], axis=2)
        return logsumexp(comp, axis=1) - np.log(p.mu.shape[0])

    def _banana_logpdf(self, x):
        p: BananaParams = self.params
        y2 = x[:, 1] + p.b * (x[:, 0] ** 2 - p.sigma2)
        out = (-0.5 * x[:, 0] ** 2 / p.sigma2 - 0.5 * np.log(p.sigma2)
               - 0.5 * y2 ** 2 - self.dim * 0.5 * _LOG_2PI)
        if self.dim > 2:
            out = out - 0.5 * np.sum(x[:, 2:] ** 2, axis=1)
        return out

    # -- moments -----------------------------------------------------------

    def ground_truth(self) -> dict:
        """Exact mean vector and normalizing constant, or raise."""
        if self.ground_truth_mean is None or self.known_Z is None:
            raise UnsupportedQueryError(
                f"target family {self.kind!r} has no closed-form moments")
        return {"mean": self.ground_truth_mean.copy(), "Z": self.known_Z}

    def sample(self, n, rng) -> np.ndarray:
        """Draw n exact samples (Gaussian and pool mixtures only)."""
        if self.kind == "pool_mixture":
            ks = rng.integers(1, self.params.size + 1, size=n)
            return self.params.draw_indexed(ks, rng)
        if self.kind != "gaussian_mixture":
            raise UnsupportedQueryError(
                f"direct sampling not available for family {self.kind!r}")
        p: GaussianMixtureParams = self.params
        ks = rng.choice(p.weights.shape[0], size=n, p=p.weights)
        z = rng.standard_normal((n, self.dim))
        out = np.empty((n, self.dim))
        for k in range(p.weights.shape[0]):
            mask = ks == k
            out[mask] = p.means[k] + z[mask] @ p._chol[k].T
        return out


def equal_gaussian_mixture_1d(means, sigma) -> TargetDensity:
    """Equal-weight 1-D Gaussian mixture with common scale sigma."""
    means = np.asarray(means, dtype=float)
    k = means.shape[0]
    return TargetDensity.gaussian_mixture(
        np.full(k, 1.0 / k), means.reshape(-1, 1),
        np.full((k, 1, 1), float(sigma) ** 2))
