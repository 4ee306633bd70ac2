"""Noisy pairwise comparators with adversary strategies and query accounting.

A comparator answers "which of two indices holds the smaller value".  Pairs
more than distance 1 apart are always answered correctly.  Pairs inside each
other's fudge zone are decided by a strategy; once decided, the outcome is
recorded in a ledger and never changes for the lifetime of the run.

Strategies (first argument of a fresh comparison acts as the pivot):

* ``exact``            -- never errs.
* ``mark-all-below``   -- every fudge neighbor is declared smaller than the
                          pivot (maximal marked set, worst case for progress).
* ``mark-none-below``  -- every fudge neighbor is declared larger than the
                          pivot (minimal marked set; can hide the minimum).
* ``random-fixed``     -- all fudge outcomes drawn up-front from the seed.
* ``random-adaptive``  -- fudge outcomes drawn lazily when first committed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .instance import Instance

STRATEGIES = ("exact", "random-fixed", "mark-all-below", "mark-none-below", "random-adaptive")


def sinsq_table(theta: float | None, marked_count: int, n_ext: int) -> list[float]:
    """Measurement success probabilities for g = 0 .. ceil(sqrt(n_ext)).

    The search ladder never draws g past its cap sqrt(n_ext), so one table
    per (pivot, list size) covers every round.
    """
    limit = math.ceil(math.sqrt(n_ext)) + 1
    if theta is None:
        p = 0.0 if marked_count == 0 else 1.0
        return [p] * limit
    gs = np.arange(limit)
    return np.square(np.sin((2 * gs + 1) * theta)).tolist()


@dataclass(frozen=True)
class MarkedSet:
    """Indices an oracle query with the given pivot would mark as smaller."""

    pivot: int
    marked: frozenset[int]


class MarkedView:
    """Compact committed marked set for one pivot over a (possibly extended) list.

    Real marked indices split into a contiguous run of the sorted order (all
    non-fudge elements below the pivot) plus an explicit list of marked fudge
    members; dummy indices are always marked.  Sampling either class is O(1).
    """

    __slots__ = ("pivot", "n_real", "n_ext", "theta", "_inst", "_order", "_prefix_len",
                 "_fudge_marked", "_fudge_unmarked", "_far_above_start", "marked_count",
                 "_table")

    def __init__(self, pivot: int, inst: Instance, fudge_marked: list[int],
                 fudge_unmarked: list[int], n_ext: int):
        n = inst.n
        rank = inst.rank(pivot)
        below, above = inst.fudge_split(pivot)
        below_fudge, above_fudge = len(below), len(above)
        self.pivot = pivot
        self.n_real = n
        self.n_ext = n_ext
        self._inst = inst
        self._order = inst.sorted_order()
        self._prefix_len = rank - 1 - below_fudge
        self._fudge_marked = fudge_marked
        self._fudge_unmarked = fudge_unmarked
        self._far_above_start = rank + above_fudge  # position in sorted order
        self.marked_count = self._prefix_len + len(fudge_marked) + (n_ext - n)
        t = self.marked_count
        self.theta = math.asin(math.sqrt(t / n_ext)) if 0 < t < n_ext else None
        self._table = None

    def success_probability(self, g: int) -> float:
        t = self.marked_count
        if t == 0:
            return 0.0
        if t == self.n_ext:
            return 1.0
        return math.sin((2 * g + 1) * self.theta) ** 2

    def sinsq_table(self) -> list[float]:
        """success_probability(g) for every g the search ladder can draw."""
        if self._table is None:
            self._table = sinsq_table(self.theta, self.marked_count, self.n_ext)
        return self._table

    def sample_marked(self, rng: random.Random) -> int:
        r = int(rng.random() * self.marked_count)
        if r >= self.marked_count:
            r = self.marked_count - 1
        if r < self._prefix_len:
            return self._order[r]
        r -= self._prefix_len
        if r < len(self._fudge_marked):
            return self._fudge_marked[r]
        return self.n_real + (r - len(self._fudge_marked))

    def sample_unmarked(self, rng: random.Random) -> int:
        n_unmarked = self.n_ext - self.marked_count
        r = int(rng.random() * n_unmarked)
        if r >= n_unmarked:
            r = n_unmarked - 1
        if r < len(self._fudge_unmarked):
            return self._fudge_unmarked[r]
        r -= len(self._fudge_unmarked)
        if r == 0:
            return self.pivot
        return self._order[self._far_above_start + r - 1]

    def contains(self, j: int) -> bool:
        if j >= self.n_real:
            return True
        if j in self._fudge_marked:
            return True
        if j in self._fudge_unmarked or j == self.pivot:
            return False
        return self._inst.rank(j) - 1 < self._prefix_len

    def as_frozenset(self) -> frozenset[int]:
        real = set(self._order[: self._prefix_len]) | set(self._fudge_marked)
        return frozenset(real | set(range(self.n_real, self.n_ext)))


class ComparatorState:
    """Per-run comparator: instance + strategy + ledger + query counters.

    Mutable and confined to a single run; never share across trials.
    """

    def __init__(self, instance: Instance, strategy: str = "exact", seed: int = 0):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        self.instance = instance
        self.strategy = strategy
        self.rng = random.Random(seed)
        self.ledger: dict[tuple[int, int], int] = {}
        self.classical_query_count = 0
        self.quantum_query_count = 0
        self._committed_pivots: set[int] = set()
        self._view_cache: dict[tuple[int, int], MarkedView] = {}
        if strategy == "random-fixed":
            self._predraw_all()

    @property
    def n(self) -> int:
        return self.instance.n

    def _predraw_all(self) -> None:
        inst = self.instance
        for j in range(inst.n):
            for i in inst.fudge_zone(j):
                if i > j:
                    self.ledger[(j, i)] = self.rng.choice((j, i))

    def _decide(self, pivot: int, other: int) -> int:
        """Ledger lookup for a fudge pair, deciding it now if still open."""
        key = (pivot, other) if pivot < other else (other, pivot)
        winner = self.ledger.get(key)
        if winner is None:
            if self.strategy == "exact":
                vals = self.instance.values
                winner = pivot if vals[pivot] < vals[other] else other
            elif self.strategy == "mark-all-below":
                winner = other
            elif self.strategy == "mark-none-below":
                winner = pivot
            else:  # random-adaptive (random-fixed pre-filled the ledger)
                winner = self.rng.choice((pivot, other))
            self.ledger[key] = winner
        return winner

    def compare(self, i: int, j: int) -> int:
        """One classical query; returns the index declared smaller.

        Pairs further than distance 1 apart are answered correctly; fudge
        pairs go through the ledger, with ``i`` treated as the pivot when the
        pair is decided fresh.
        """
        if i == j:
            raise ValueError("compare requires two distinct indices")
        inst = self.instance
        inst._check_index(i)
        inst._check_index(j)
        self.classical_query_count += 1
        vi, vj = inst.values[i], inst.values[j]
        if abs(vi - vj) > 1.0:
            return i if vi < vj else j
        return self._decide(i, j)

    def oracle_bit(self, pivot: int, j: int) -> int:
        """1 iff the comparator declares j smaller than the pivot.

        Dummy indices (j >= n) are always marked; an index is never marked
        against itself.
        """
        if j >= self.instance.n:
            return 1
        if j == pivot:
            return 0
        return 1 if self.compare(pivot, j) == j else 0

    def commit_pivot(self, pivot: int) -> None:
        """Decide every still-open fudge pair involving ``pivot``.

        Models one superposition query, which needs all oracle bits of the
        pivot's row at once.  Does not count as a classical query.
        """
        if pivot in self._committed_pivots:
            return
        for j in self.instance.fudge_zone(pivot):
            self._decide(pivot, j)
        self._committed_pivots.add(pivot)

    def marked_view(self, pivot: int, n_ext: int | None = None) -> MarkedView:
        """Commit the pivot's row and return the compact marked set.

        Once a row is committed its decisions can never change, so the view
        is cached per (pivot, list size).
        """
        inst = self.instance
        inst._check_index(pivot)
        n_ext = inst.n if n_ext is None else n_ext
        cached = self._view_cache.get((pivot, n_ext))
        if cached is not None:
            return cached
        self.commit_pivot(pivot)
        fudge_marked, fudge_unmarked = [], []
        for j in inst.fudge_zone(pivot):
            key = (pivot, j) if pivot < j else (j, pivot)
            (fudge_marked if self.ledger[key] == j else fudge_unmarked).append(j)
        view = MarkedView(pivot, inst, fudge_marked, fudge_unmarked, n_ext)
        self._view_cache[(pivot, n_ext)] = view
        return view

    def marked_set(self, pivot: int, list_size: int | None = None) -> MarkedSet:
        """Full marked set for the pivot, including dummies beyond index n-1."""
        view = self.marked_view(pivot, list_size)
        return MarkedSet(pivot=pivot, marked=view.as_frozenset())

    def rank_of(self, j: int) -> int:
        """Ground-truth rank; bookkeeping only, never used to steer a search."""
        return self.instance.rank(j)

    def distance_to_minimum(self, j: int) -> float:
        vals = self.instance.values
        return abs(vals[j] - vals[self.instance.minimum()])
