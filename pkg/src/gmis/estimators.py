"""Moment and normalizing-constant estimators over weighted sample sets,
plus the a-priori partition reweighting for deterministic-selection runs.

All reductions materialize linear weights only through a max-shift
(log-sum-exp) so extreme log-weights cannot overflow; summation order is
the sample order, keeping results bit-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError
from .indexing import SamplingMode
from .schemes import WeightedSampleSet


@dataclass(frozen=True)
class Estimand:
    """Component-wise moment function g, configured declaratively."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def from_name(cls, name: str) -> "Estimand":
        if name == "identity":
            return cls("identity", lambda x: x)
        if name == "square":
            return cls("square", lambda x: x ** 2)
        raise InputError(f"unknown estimand {name!r}; use 'identity' or 'square'")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.fn(x)


IDENTITY = Estimand.from_name("identity")


def _shifted_weights(log_weights: np.ndarray):
    """(shift, exp(log_w - shift)) with a finite shift even for all -inf."""
    shift = np.max(log_weights)
    if not np.isfinite(shift):
        shift = 0.0
    return shift, np.exp(log_weights - shift)


def estimate_Z(ws: WeightedSampleSet) -> float:
    """Unbiased normalizing-constant estimate: the plain weight mean."""
    if len(ws) < 1:
        raise InputError("need at least one sample")
    shift, w = _shifted_weights(ws.log_weights)
    return float(np.exp(shift) * np.mean(w))


def estimate_unnormalized(ws: WeightedSampleSet, g: Estimand = IDENTITY,
                          z: float = 1.0) -> np.ndarray:
    """Unbiased moment estimate (1 / (M Z)) sum w_n g(x_n)."""
    if z <= 0:
        raise InputError("normalizing constant must be positive")
    shift, w = _shifted_weights(ws.log_weights)
    gx = np.atleast_2d(np.asarray(g(ws.samples), dtype=float))
    return np.exp(shift) / (len(ws) * z) * (w @ gx)


def estimate_self_normalized(ws: WeightedSampleSet, g: Estimand = IDENTITY) -> np.ndarray:
    """Self-normalized moment estimate sum w_n g(x_n) / sum w_n.

    Invariant to rescaling the target by any positive constant (the
    log-space shift cancels exactly).
    """
    shift, w = _shifted_weights(ws.log_weights)
    total = np.sum(w)
    if total == 0.0:
        raise InputError("all weights are zero; self-normalization undefined")
    gx = np.atleast_2d(np.asarray(g(ws.samples), dtype=float))
    return (w @ gx) / total


@dataclass(frozen=True)
class Partition:
    """Disjoint index subsets covering {1..N} (unequal sizes allowed)."""

    subsets: tuple

    def __post_init__(self):
        subsets = tuple(tuple(sorted(int(i) for i in s)) for s in self.subsets)
        if not subsets or any(not s for s in subsets):
            raise InputError("partition subsets must be nonempty")
        flat = [i for s in subsets for i in s]
        n = len(flat)
        if sorted(flat) != list(range(1, n + 1)):
            raise InputError("subsets must be disjoint and cover 1..N")
        object.__setattr__(self, "subsets", subsets)

    @property
    def n_indexes(self) -> int:
        return sum(len(s) for s in self.subsets)

    def owner(self, index: int) -> tuple:
        for s in self.subsets:
            if index in s:
                return s
        raise InputError(f"index {index} not covered by partition")


def partition_log_weights(ws: WeightedSampleSet, pool, target,
                          partition: Partition) -> np.ndarray:
    """Partial deterministic-mixture log-weights.

    Requires a run produced under deterministic index selection (one
    sample per proposal per block); sample n is weighted against the
    equal-weight mixture of the subset owning proposal n. The one-subset
    partition reproduces the full-mixture weights and the all-singletons
    partition the per-proposal weights, sample for sample.
    """
    if any(seq.mode is not SamplingMode.DETERMINISTIC for seq in ws.index_seqs):
        raise InputError("partition weighting needs deterministic index selection")
    if partition.n_indexes != pool.size:
        raise InputError("partition does not cover the pool")
    N = pool.size
    out = np.empty(len(ws))
    for m in range(len(ws)):
        n = m % N + 1
        subset = partition.owner(n)
        out[m] = (float(target.log_density(ws.samples[m]))
                  - float(pool.log_mixture_eval(subset, ws.samples[m])))
    return out
