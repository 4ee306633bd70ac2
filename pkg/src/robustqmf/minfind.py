"""Minimum-finding algorithms over a noisy comparator.

Four variants, from the classic noiseless routine to the fully robust one:

* :func:`qmf_noiseless`      -- total-time budget, exact comparator only.
* :func:`pivot_qmf`          -- caps the number of search attempts instead of
                                the total time; tolerates a noisy comparator.
* :func:`repeated_pivot_qmf` -- boosts the attempt-capped search and keeps the
                                best of the pool via tournament selection.
* :func:`robust_qmf`         -- additionally sweeps below the stage-one winner
                                (with always-marked dummy indices appended so
                                the search stays fast) before the final
                                tournament; output is within distance 2 of the
                                true minimum with probability 1 - delta_prob.

The tournament (:func:`min_select`) plays every pair in the pool once and
returns the element with the most wins; it stands in for a classical noisy
minimum-selection routine and always lands within distance 2 of the pool
minimum, for every consistent fudge-pair decision table.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .comparator import ComparatorState
from .grover import qsearch_with_cutoff


@dataclass(frozen=True)
class DerivedConstants:
    """Run-length and cutoff parameters derived from (n, delta, delta_prob)."""

    n_p: int
    n_trials: int
    t_max: float
    cutoff: float
    t_tilde: int
    k_dummies: int
    stage2_iters: int


@dataclass
class PivotTrace:
    """Rank bookkeeping for one attempt-capped run (ground truth only).

    ``attempted_pivot_ranks[i]`` is the rank of the pivot fed into attempt i;
    ``successful_pivot_ranks`` is its subsequence at attempts that changed the
    pivot.  Appending ``final_rank`` to the successful sequence gives the full
    chain of ranks visited by successful changes.
    """

    attempted_pivot_ranks: list[int] = field(default_factory=list)
    successful_pivot_ranks: list[int] = field(default_factory=list)
    final_rank: int = 0

    def transitions(self) -> list[tuple[int, int]]:
        """(rank before, rank after) for every successful pivot change."""
        chain = self.successful_pivot_ranks + [self.final_rank]
        return list(zip(chain[:-1], chain[1:]))


@dataclass(frozen=True)
class ExtendedList:
    """Real list of size n with k always-marked dummy indices appended."""

    n_real: int
    n_dummies: int

    @property
    def size(self) -> int:
        return self.n_real + self.n_dummies

    def is_dummy(self, idx: int) -> bool:
        return idx >= self.n_real


def extend_with_dummies(n: int, k: int) -> ExtendedList:
    if k < 0:
        raise ValueError("dummy count must be >= 0")
    return ExtendedList(n_real=n, n_dummies=k)


def derived_constants(n: int, delta: int, delta_prob: float) -> DerivedConstants:
    """All knobs the robust algorithms need, from the three inputs."""
    if n <= 2 * (1 + delta):
        raise ValueError(f"need n > 2*(1+delta): n={n}, delta={delta}")
    if not 0.0 < delta_prob < 1.0:
        raise ValueError(f"need 0 < delta_prob < 1, got {delta_prob}")
    n_p = math.ceil(math.log(n / (4 * delta + 3)) / math.log(1.5))
    n_trials = math.ceil(8 * max(n_p, 2 * math.log(n)))
    t_tilde = 19 * delta + 16
    return DerivedConstants(
        n_p=n_p,
        n_trials=n_trials,
        t_max=22.5 * math.sqrt(n) + 1.4 * math.log2(n) ** 2,
        cutoff=9.0 * math.sqrt(n / (1 + delta)),
        t_tilde=t_tilde,
        k_dummies=2 * delta,
        stage2_iters=math.ceil(2 * math.log(2) * math.log2(4 / delta_prob) * t_tilde),
    )


def qmf_noiseless(state: ComparatorState, rng: random.Random | None = None) -> int:
    """Total-time-budgeted minimum finding; requires the exact comparator.

    Runs cutoff searches against the remaining budget (charging the uniform
    state preparation log term) and adopts every marked outcome as the new
    pivot until the budget 22.5*sqrt(N) + 1.4*log2(N)^2 is spent.
    """
    if state.strategy != "exact":
        raise ValueError("the total-time-budgeted variant requires the exact comparator")
    rng = state.rng if rng is None else rng
    n = state.n
    t_max = 22.5 * math.sqrt(n) + 1.4 * math.log2(n) ** 2
    y = rng.randrange(n)
    t_qmf = 0.0
    while t_qmf <= t_max:
        out = qsearch_with_cutoff(state, y, t_max - t_qmf, b=1, rng=rng)
        t_qmf += out.search_time
        if state.oracle_bit(y, out.result_index):
            y = out.result_index
    return y


def pivot_qmf(state: ComparatorState, delta: int, n_trials: int,
              rng: random.Random | None = None) -> tuple[int, PivotTrace]:
    """Attempt-capped minimum finding: n_trials cutoff searches, keep winners.

    Each attempt runs a search with cutoff ``9*sqrt(N/(1+delta))`` against the
    current pivot and adopts the outcome whenever the comparator marks it
    smaller.  Returns the final pivot plus the rank trace.
    """
    rng = state.rng if rng is None else rng
    n = state.n
    cutoff = 9.0 * math.sqrt(n / (1 + delta))
    y = rng.randrange(n)
    trace = PivotTrace()
    for _ in range(n_trials):
        trace.attempted_pivot_ranks.append(state.rank_of(y))
        out = qsearch_with_cutoff(state, y, cutoff, b=0, rng=rng)
        if state.oracle_bit(y, out.result_index):
            trace.successful_pivot_ranks.append(state.rank_of(y))
            y = out.result_index
    trace.final_rank = state.rank_of(y)
    return y, trace


def repeated_pivot_qmf(state: ComparatorState, delta_prob: float, delta: int,
                       rng: random.Random | None = None) -> int:
    """Boosted attempt-capped search: pool the repetitions, pick by tournament."""
    rng = state.rng if rng is None else rng
    consts = derived_constants(state.n, delta, delta_prob)
    reps = math.ceil(math.log(2 / delta_prob, 4))
    pool: set[int] = set()
    for _ in range(max(reps, 1)):
        y, _ = pivot_qmf(state, delta, consts.n_trials, rng=rng)
        pool.add(y)
    return min_select(state, pool, delta_prob / 2)


def robust_qmf(state: ComparatorState, delta_prob: float, delta: int,
               rng: random.Random | None = None) -> int:
    """Full pipeline: boosted search, sweep below the winner, tournament.

    The sweep stage appends ``2*delta`` always-marked dummy indices so every
    search has enough marked elements to finish within the cutoff, collects
    the non-dummy marked outcomes, and hands the deduplicated pool to the
    tournament.  Output is within distance 2 of the true minimum with
    probability at least ``1 - delta_prob``, for any comparator strategy.
    """
    rng = state.rng if rng is None else rng
    y_out = repeated_pivot_qmf(state, delta_prob / 2, delta, rng=rng)
    pool = robust_stage2_pool(state, y_out, delta_prob, delta, rng=rng)
    return min_select(state, pool, delta_prob / 4)


def robust_stage2_pool(state: ComparatorState, y_out: int, delta_prob: float,
                       delta: int, rng: random.Random | None = None) -> set[int]:
    """Sweep below ``y_out`` on the dummy-extended list; return the dedup pool."""
    rng = state.rng if rng is None else rng
    consts = derived_constants(state.n, delta, delta_prob)
    ext = extend_with_dummies(state.n, consts.k_dummies)
    pool = {y_out}
    for _ in range(consts.stage2_iters):
        out = qsearch_with_cutoff(state, y_out, consts.cutoff, b=0,
                                  extended_size=ext.size, rng=rng)
        if out.found_marked and not ext.is_dummy(out.result_index):
            pool.add(out.result_index)
    return pool


def min_select(state: ComparatorState, pool, delta_prob: float = 0.0) -> int:
    """Round-robin tournament over the pool; most wins takes it.

    Plays each unordered pair once (lower index first, acting as the pivot
    for any fresh fudge decision) and breaks win ties toward the smaller
    index.  Uses |pool|*(|pool|-1)/2 classical queries; the winner is always
    within distance 2 of the pool minimum, whatever the fudge decisions.
    The ``delta_prob`` argument is part of the selection contract but unused
    by this deterministic implementation.
    """
    entries = sorted(set(pool))
    if not entries:
        raise ValueError("min_select needs a non-empty pool")
    if len(entries) == 1:
        return entries[0]
    wins = {idx: 0 for idx in entries}
    for a_pos, a in enumerate(entries):
        for b in entries[a_pos + 1:]:
            wins[state.compare(a, b)] += 1
    return max(entries, key=lambda idx: (wins[idx], -idx))
