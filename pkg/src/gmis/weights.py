"""Importance-weight denominators.

Every weighting option is reduced to an index multiset: the denominator
is always the equal-weight mixture of the proposals named by that
multiset, so the structure of each option (and the collisions between
options under each sampling mode) can be inspected and tested directly.
The log-weight is then log pi(x) - log mixture(x).
"""

from __future__ import annotations

import enum

from .errors import InputError
from .indexing import IndexSequence, SamplingMode


class WeightingOption(enum.Enum):
    CONDITIONAL = "W1"        # density of x_n given the index history
    SELECTED = "W2"           # the proposal actually selected
    MARGINAL = "W3"           # marginal density of x_n
    REALIZED_MIXTURE = "W4"   # mixture of the realized index multiset
    FULL_MIXTURE = "W5"       # full equal-weight pool mixture

    @classmethod
    def from_string(cls, s: str) -> "WeightingOption":
        try:
            return cls(s)
        except ValueError:
            raise InputError(f"unknown weighting option {s!r}") from None


def denominator_subset(option: WeightingOption, mode: SamplingMode,
                       n: int, jseq: IndexSequence, n_proposals: int) -> tuple:
    """Index multiset whose equal-weight mixture is the n-th denominator.

    n is 1-based. The returned tuple is sorted; repeats are kept (they
    matter for the realized-mixture option under sampling with
    replacement).
    """
    N = n_proposals
    if not 1 <= n <= len(jseq.indexes):
        raise InputError(f"sample position {n} out of range")
    if jseq.mode is not mode:
        raise InputError("index sequence was generated under a different mode")
    full = tuple(range(1, N + 1))
    if option is WeightingOption.SELECTED:
        return (jseq.indexes[n - 1],)
    if option is WeightingOption.FULL_MIXTURE:
        return full
    if option is WeightingOption.REALIZED_MIXTURE:
        return tuple(sorted(jseq.indexes))
    if option is WeightingOption.MARGINAL:
        if mode is SamplingMode.DETERMINISTIC:
            return (n,)
        return full
    # CONDITIONAL
    if mode is SamplingMode.WITH_REPLACEMENT:
        return full
    if mode is SamplingMode.DETERMINISTIC:
        return (n,)
    used = set(jseq.indexes[: n - 1])
    return tuple(j for j in full if j not in used)


def log_weight(target, pool, option: WeightingOption, mode: SamplingMode,
               n: int, jseq: IndexSequence, x) -> float:
    """log w_n = log pi(x) - log of the denominator mixture at x."""
    subset = denominator_subset(option, mode, n, jseq, pool.size)
    return float(target.log_density(x)) - float(pool.log_mixture_eval(subset, x))
