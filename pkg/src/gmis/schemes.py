"""Composition of index selection, proposal draws and weighting into
complete MIS schemes.

Six named schemes exist (R1, R2, R3 sample with replacement; N1, N2, N3
without); any other (sampling mode, weighting option) pair can be run in
expert mode. Runs are instrumented with target- and proposal-evaluation
counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .indexing import IndexSequence, SamplingMode, select_indexes
from .weights import WeightingOption, denominator_subset

# canonical (sampling, weighting) expansion of the named schemes
NAMED_SCHEMES = {
    "R1": (SamplingMode.WITH_REPLACEMENT, WeightingOption.SELECTED),
    "R2": (SamplingMode.WITH_REPLACEMENT, WeightingOption.REALIZED_MIXTURE),
    "R3": (SamplingMode.WITH_REPLACEMENT, WeightingOption.FULL_MIXTURE),
    "N1": (SamplingMode.DETERMINISTIC, WeightingOption.SELECTED),
    "N2": (SamplingMode.RANDOM_PERMUTATION, WeightingOption.CONDITIONAL),
    "N3": (SamplingMode.DETERMINISTIC, WeightingOption.FULL_MIXTURE),
}

# which named scheme each of the 15 (mode, option) cells collapses to
SCHEME_OF_PAIR = {
    (SamplingMode.WITH_REPLACEMENT, WeightingOption.CONDITIONAL): "R3",
    (SamplingMode.WITH_REPLACEMENT, WeightingOption.SELECTED): "R1",
    (SamplingMode.WITH_REPLACEMENT, WeightingOption.MARGINAL): "R3",
    (SamplingMode.WITH_REPLACEMENT, WeightingOption.REALIZED_MIXTURE): "R2",
    (SamplingMode.WITH_REPLACEMENT, WeightingOption.FULL_MIXTURE): "R3",
    (SamplingMode.RANDOM_PERMUTATION, WeightingOption.CONDITIONAL): "N2",
    (SamplingMode.RANDOM_PERMUTATION, WeightingOption.SELECTED): "N1",
    (SamplingMode.RANDOM_PERMUTATION, WeightingOption.MARGINAL): "N3",
    (SamplingMode.RANDOM_PERMUTATION, WeightingOption.REALIZED_MIXTURE): "N3",
    (SamplingMode.RANDOM_PERMUTATION, WeightingOption.FULL_MIXTURE): "N3",
    (SamplingMode.DETERMINISTIC, WeightingOption.CONDITIONAL): "N1",
    (SamplingMode.DETERMINISTIC, WeightingOption.SELECTED): "N1",
    (SamplingMode.DETERMINISTIC, WeightingOption.MARGINAL): "N1",
    (SamplingMode.DETERMINISTIC, WeightingOption.REALIZED_MIXTURE): "N3",
    (SamplingMode.DETERMINISTIC, WeightingOption.FULL_MIXTURE): "N3",
}


@dataclass(frozen=True)
class SchemeSpec:
    """A runnable scheme: named or a raw (mode, option) pair, plus the
    number of independent blocks k (total samples M = k * N)."""

    mode: SamplingMode
    option: WeightingOption
    blocks: int = 1
    name: Optional[str] = None

    def __post_init__(self):
        if self.blocks < 1:
            raise InputError("blocks must be >= 1")

    @classmethod
    def from_name(cls, name: str, blocks: int = 1) -> "SchemeSpec":
        if name not in NAMED_SCHEMES:
            raise InputError(f"unknown scheme {name!r}; expected one of "
                             f"{sorted(NAMED_SCHEMES)}")
        mode, option = NAMED_SCHEMES[name]
        return cls(mode, option, blocks, name)

    @classmethod
    def from_pair(cls, mode, option, blocks: int = 1) -> "SchemeSpec":
        if isinstance(mode, str):
            mode = SamplingMode.from_string(mode)
        if isinstance(option, str):
            option = WeightingOption.from_string(option)
        return cls(mode, option, blocks, None)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return f"{self.mode.value}:{self.option.value}"

    @property
    def equivalent_named(self) -> str:
        return SCHEME_OF_PAIR[(self.mode, self.option)]


@dataclass
class WeightedSampleSet:
    """Samples, log-weights and bookkeeping from one scheme run."""

    samples: np.ndarray                 # (M, d)
    log_weights: np.ndarray             # (M,)
    index_seqs: list                    # one IndexSequence per block
    counters: dict = field(default_factory=dict)

    def __len__(self):
        return self.samples.shape[0]


def run_scheme(spec: SchemeSpec, target, pool, rng: np.random.Generator) -> WeightedSampleSet:
    """Run one scheme: k blocks of N weighted samples.

    Counters: `target_evals` is one per sample; `proposal_evals` counts
    each mixand occurrence in each denominator (raw multiset size);
    `proposal_evals_distinct` deduplicates repeated mixands per sample.
    """
    if pool.dim != target.dim:
        raise InputError("pool and target dimensions differ")
    N = pool.size
    M = spec.blocks * N
    samples = np.empty((M, pool.dim))
    log_w = np.empty(M)
    seqs = []
    target_evals = 0
    prop_raw = 0
    prop_distinct = 0
    pos = 0
    # separate streams so the amount of randomness spent on index
    # selection never shifts the draws (schemes then coincide exactly
    # whenever their index sequences do)
    idx_rng, draw_rng = rng.spawn(2)
    for _ in range(spec.blocks):
        jseq = select_indexes(spec.mode, N, idx_rng)
        seqs.append(jseq)
        xs = [pool.draw(j, draw_rng) for j in jseq.indexes]
        for n in range(1, N + 1):
            x = xs[n - 1]
            subset = denominator_subset(spec.option, spec.mode, n, jseq, N)
            log_den = pool.log_mixture_eval(subset, x)
            log_pi = target.log_density(x)
            target_evals += 1
            prop_raw += len(subset)
            prop_distinct += len(set(subset))
            samples[pos] = x
            log_w[pos] = log_pi - log_den
            pos += 1
    return WeightedSampleSet(
        samples=samples, log_weights=log_w, index_seqs=seqs,
        counters={"target_evals": target_evals,
                  "proposal_evals": prop_raw,
                  "proposal_evals_distinct": prop_distinct})


def evaluation_counts(spec: SchemeSpec, n_proposals: int) -> dict:
    """Predicted per-block evaluation counts.

    Returns target count and an inclusive (min, max) range of distinct
    proposal evaluations; min == max for every pair except sampling with
    replacement combined with the realized-mixture weighting, whose
    distinct count is random in [N, N^2].
    """
    N = n_proposals
    if N < 1:
        raise InputError("need at least one proposal")
    mode, option = spec.mode, spec.option
    if option is WeightingOption.SELECTED:
        per = N
    elif option is WeightingOption.FULL_MIXTURE:
        per = N * N
    elif option is WeightingOption.MARGINAL:
        per = N if mode is SamplingMode.DETERMINISTIC else N * N
    elif option is WeightingOption.CONDITIONAL:
        if mode is SamplingMode.WITH_REPLACEMENT:
            per = N * N
        elif mode is SamplingMode.DETERMINISTIC:
            per = N
        else:
            per = N * (N + 1) // 2
    else:  # REALIZED_MIXTURE
        if mode is SamplingMode.WITH_REPLACEMENT:
            return {"target": N, "proposal_range": (N, N * N)}
        per = N * N
    return {"target": N, "proposal_range": (per, per)}
