"""Proposal densities and pools thereof.

A pool is an ordered set of N parametric proposals sharing one
dimension. Pools evaluate single components, the full equal-weight
mixture, or the mixture over an arbitrary index multiset, always in
log-space. Proposal indexes are 1-based throughout the package (index n
selects the n-th proposal, which is what makes the deterministic
index-selection procedure meaningful).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DimensionMismatchError, InputError

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class Proposal:
    """One parametric proposal: Gaussian or non-standardized Student-t.

    scale is per-dimension (isotropic scales may be given as a scalar);
    dof applies to Student-t only.
    """

    family: str                 # "gaussian" | "student_t"
    location: np.ndarray        # (d,)
    scale: np.ndarray           # (d,)
    dof: Optional[float] = None

    def __post_init__(self):
        if self.family not in ("gaussian", "student_t"):
            raise InputError(f"unknown proposal family {self.family!r}")
        loc = np.atleast_1d(np.asarray(self.location, dtype=float))
        scale = np.broadcast_to(np.asarray(self.scale, dtype=float), loc.shape).copy()
        if np.any(scale <= 0):
            raise InputError("proposal scales must be strictly positive")
        if self.family == "student_t":
            if self.dof is None or self.dof <= 0:
                raise InputError("student_t proposals need dof > 0")
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "scale", scale)

    @property
    def dim(self) -> int:
        return self.location.shape[0]


class ProposalPool:
    """Ordered collection of proposals with log-space mixture evaluation."""

    def __init__(self, proposals: Sequence[Proposal]):
        proposals = tuple(proposals)
        if not proposals:
            raise InputError("pool needs at least one proposal")
        d = proposals[0].dim
        if any(p.dim != d for p in proposals):
            raise DimensionMismatchError("all proposals must share one dimension")
        self.proposals = proposals
        self.dim = d
        self.size = len(proposals)
        # stacked parameters for vectorized evaluation
        self._loc = np.stack([p.location for p in proposals])   # (N, d)
        self._scale = np.stack([p.scale for p in proposals])    # (N, d)
        self._families = tuple(p.family for p in proposals)
        self._dof = np.array([p.dof if p.dof is not None else np.nan
                              for p in proposals])

    # -- factories ---------------------------------------------------------

    @staticmethod
    def _expand_scales(scales, locations):
        """Accept a scalar, one scale per proposal, or a full (N, d) grid."""
        s = np.asarray(scales, dtype=float)
        if s.ndim == 1 and s.shape[0] == locations.shape[0]:
            s = s[:, None]
        return np.broadcast_to(s, locations.shape)

    @classmethod
    def gaussian(cls, locations, scales) -> "ProposalPool":
        locations = np.atleast_2d(np.asarray(locations, dtype=float))
        scales = cls._expand_scales(scales, locations)
        return cls([Proposal("gaussian", locations[i], scales[i])
                    for i in range(locations.shape[0])])

    @classmethod
    def student_t(cls, locations, scales, dof) -> "ProposalPool":
        locations = np.atleast_2d(np.asarray(locations, dtype=float))
        scales = cls._expand_scales(scales, locations)
        return cls([Proposal("student_t", locations[i], scales[i], dof=float(dof))
                    for i in range(locations.shape[0])])

    # -- sampling ----------------------------------------------------------

    def _check_index(self, index: int):
        if not 1 <= index <= self.size:
            raise InputError(f"proposal index {index} out of range 1..{self.size}")

    def draw(self, index: int, rng: np.random.Generator) -> np.ndarray:
        """One variate from the index-th proposal (1-based)."""
        self._check_index(index)
        p = self.proposals[index - 1]
        if p.family == "gaussian":
            return p.location + p.scale * rng.standard_normal(self.dim)
        return p.location + p.scale * rng.standard_t(p.dof, size=self.dim)

    def draw_indexed(self, indexes, rng: np.random.Generator) -> np.ndarray:
        """Vectorized draws: one variate per entry of a 1-based index array."""
        idx = np.asarray(indexes) - 1
        if idx.min() < 0 or idx.max() >= self.size:
            raise InputError("proposal index out of range")
        shape = idx.shape + (self.dim,)
        if all(f == "gaussian" for f in self._families):
            z = rng.standard_normal(shape)
            return self._loc[idx] + self._scale[idx] * z
        if all(f == "student_t" for f in self._families):
            z = rng.standard_t(self._dof[idx][..., None], size=shape)
            return self._loc[idx] + self._scale[idx] * z
        # mixed pools fall back to per-sample draws
        flat = idx.reshape(-1)
        out = np.stack([self.draw(int(i) + 1, rng) for i in flat])
        return out.reshape(shape)

    # -- evaluation --------------------------------------------------------

    def log_eval_matrix(self, x) -> np.ndarray:
        """log q_n(x) for every proposal: input (..., d) -> output (..., N)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"expected points of dimension {self.dim}, got {x.shape[-1]}")
        z = (x[..., None, :] - self._loc) / self._scale      # (..., N, d)
        logscale = np.sum(np.log(self._scale), axis=1)        # (N,)
        out = np.empty(z.shape[:-1])
        gmask = np.array([f == "gaussian" for f in self._families])
        if gmask.any():
            out[..., gmask] = (-0.5 * np.sum(z[..., gmask, :] ** 2, axis=-1)
                               - 0.5 * self.dim * _LOG_2PI - logscale[gmask])
        if not gmask.all():
            tmask = ~gmask
            nu = self._dof[tmask]
            lognorm = (gammaln((nu + 1) / 2) - gammaln(nu / 2)
                       - 0.5 * np.log(nu * np.pi))
            out[..., tmask] = (
                np.sum(-0.5 * (nu[:, None] + 1)
                       * np.log1p(z[..., tmask, :] ** 2 / nu[:, None]),
                       axis=-1)
                + self.dim * lognorm - logscale[tmask])
        return out

    def log_eval(self, index: int, x) -> float:
        """log q_index(x) at one point (1-based index)."""
        self._check_index(index)
        return float(np.asarray(self.log_eval_matrix(x))[..., index - 1])

    def log_mixture_eval(self, subset, x):
        """Log of the equal-weight mixture over an index multiset.

        Repeats in the multiset count: subset (1, 3, 3) realizes
        (q1 + 2 q3) / 3. Computed via log-sum-exp.
        """
        subset = tuple(subset)
        if not subset:
            raise InputError("mixture subset must be nonempty")
        for j in subset:
            self._check_index(j)
        counts = np.bincount(np.asarray(subset) - 1, minlength=self.size)
        logq = self.log_eval_matrix(x)
        active = counts > 0
        with np.errstate(divide="ignore"):
            logc = np.log(counts[active])
        out = logsumexp(logq[..., active] + logc, axis=-1) - np.log(len(subset))
        return float(out) if np.ndim(out) == 0 else out

    def log_mixture_all(self, x):
        """Log of the full equal-weight pool mixture."""
        return self.log_mixture_eval(range(1, self.size + 1), x)


def uniform_locations(n, low, high, dim, rng) -> np.ndarray:
    """Location-sampling rule: n points uniform in [low, high]^dim."""
    return rng.uniform(low, high, size=(n, dim))
