"""Index-selection procedures for choosing which proposal generates
each sample.

Three procedures are supported, selected by `SamplingMode`:

* S1 -- iid uniform selection with replacement,
* S2 -- uniform random permutation (selection without replacement),
* S3 -- the deterministic identity sequence (1, 2, ..., N).

Indexes are 1-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputError


class SamplingMode(enum.Enum):
    WITH_REPLACEMENT = "S1"
    RANDOM_PERMUTATION = "S2"
    DETERMINISTIC = "S3"

    @classmethod
    def from_string(cls, s: str) -> "SamplingMode":
        try:
            return cls(s)
        except ValueError:
            raise InputError(f"unknown sampling mode {s!r}") from None


@dataclass(frozen=True)
class IndexSequence:
    """A realized sequence j_1..j_N plus the mode that produced it."""

    mode: SamplingMode
    indexes: tuple

    def __post_init__(self):
        n = len(self.indexes)
        idx = tuple(int(i) for i in self.indexes)
        if any(not 1 <= i <= n for i in idx):
            raise InputError("index sequence entries must lie in 1..N")
        if self.mode is SamplingMode.RANDOM_PERMUTATION and sorted(idx) != list(range(1, n + 1)):
            raise InputError("random-permutation sequences must be permutations of 1..N")
        if self.mode is SamplingMode.DETERMINISTIC and idx != tuple(range(1, n + 1)):
            raise InputError("deterministic sequences must be exactly (1..N)")
        object.__setattr__(self, "indexes", idx)

    def __len__(self):
        return len(self.indexes)


def select_indexes(mode: SamplingMode, n: int, rng: np.random.Generator) -> IndexSequence:
    """Generate one index sequence of length n under the given mode.

    The deterministic mode consumes no randomness.
    """
    if n < 1:
        raise InputError("need at least one proposal")
    if mode is SamplingMode.WITH_REPLACEMENT:
        idx = rng.integers(1, n + 1, size=n)
    elif mode is SamplingMode.RANDOM_PERMUTATION:
        idx = rng.permutation(n) + 1
    else:
        idx = np.arange(1, n + 1)
    return IndexSequence(mode, tuple(int(i) for i in idx))


def conditional_pmf(mode: SamplingMode, n: int, history, k: int) -> float:
    """P(J_m = k | j_1..j_{m-1}) where m = len(history) + 1.

    With replacement the pmf is uniform 1/N regardless of history;
    without replacement it is uniform over the still-available indexes;
    the deterministic mode is an indicator on k = m.
    """
    history = tuple(int(i) for i in history)
    m = len(history) + 1
    if m > n:
        raise InputError("history already has N entries")
    if not 1 <= k <= n or any(not 1 <= j <= n for j in history):
        raise InputError("indexes must lie in 1..N")
    if mode is SamplingMode.WITH_REPLACEMENT:
        return 1.0 / n
    if mode is SamplingMode.RANDOM_PERMUTATION:
        if len(set(history)) != len(history):
            raise InputError("history repeats an index, impossible without replacement")
        if k in history:
            return 0.0
        return 1.0 / (n - m + 1)
    # deterministic
    if history != tuple(range(1, m)):
        raise InputError("history inconsistent with deterministic selection")
    return 1.0 if k == m else 0.0
