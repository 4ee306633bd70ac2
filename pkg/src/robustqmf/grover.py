"""Exact probabilistic model of Grover search and cutoff exponential search.

Measurement after ``g`` Grover iterations on a uniform start state lands in
the marked class with probability ``sin^2((2g+1) * asin(sqrt(t/N)))`` and is
uniform within either class.  The simulation draws the class with one coin
flip and then a uniform index, which reproduces the exact distribution; the
dense statevector reference below exists to validate that claim.

Query accounting: each Grover iteration costs two quantum oracle queries;
every classical check of an oracle bit costs one classical query.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .comparator import ComparatorState, MarkedSet

LAMBDA = 6.0 / 5.0
STATEVECTOR_CAP = 1024


@dataclass(frozen=True)
class GroverParams:
    """Search configuration: list size N' (with dummies), marked count, iterations."""

    list_size: int
    marked_count: int
    iterations: int

    def __post_init__(self):
        if self.list_size < 1:
            raise ValueError("list_size must be >= 1")
        if not 0 <= self.marked_count <= self.list_size:
            raise ValueError("marked_count must lie in [0, list_size]")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one cutoff exponential search."""

    result_index: int
    search_time: float
    found_marked: bool


def success_probability(params: GroverParams) -> float:
    """Probability that measuring after g iterations yields a marked index."""
    t, n, g = params.marked_count, params.list_size, params.iterations
    if t == 0:
        return 0.0
    if t == n:
        return 1.0
    theta = math.asin(math.sqrt(t / n))
    return math.sin((2 * g + 1) * theta) ** 2


def sample_measurement(state: ComparatorState, pivot: int, params: GroverParams,
                       marked: MarkedSet, rng: random.Random) -> int:
    """Draw one measurement outcome; adds 2*g quantum queries to the state."""
    if marked.pivot != pivot:
        raise ValueError("marked set does not belong to this pivot")
    if len(marked.marked) != params.marked_count:
        raise ValueError("marked set size disagrees with params.marked_count")
    state.quantum_query_count += 2 * params.iterations
    p = success_probability(params)
    marked_sorted = sorted(marked.marked)
    if rng.random() < p:
        return marked_sorted[rng.randrange(len(marked_sorted))]
    unmarked = [i for i in range(params.list_size) if i not in marked.marked]
    return unmarked[rng.randrange(len(unmarked))]


def statevector_reference(list_size: int, marked, g: int) -> np.ndarray:
    """Exact measurement distribution after g literal Grover iterations.

    Applies the phase-flip oracle and the inversion-about-the-mean diffusion
    to a dense amplitude vector.  Test oracle only; capped at 1024 entries.
    """
    if list_size > STATEVECTOR_CAP:
        raise ValueError(f"list_size {list_size} exceeds statevector cap {STATEVECTOR_CAP}")
    if list_size < 1:
        raise ValueError("list_size must be >= 1")
    marked_idx = sorted(marked)
    if marked_idx and not (0 <= marked_idx[0] and marked_idx[-1] < list_size):
        raise ValueError("marked indices out of range")
    amps = np.full(list_size, 1.0 / math.sqrt(list_size))
    for _ in range(g):
        amps[marked_idx] *= -1.0
        amps = 2.0 * amps.mean() - amps
    return amps * amps


def qsearch_with_cutoff(state: ComparatorState, pivot: int, cutoff: float,
                        b: int = 0, extended_size: int | None = None,
                        rng: random.Random | None = None) -> SearchOutcome:
    """Exponential search for an element marked smaller than the pivot.

    Draws one uniform index first and returns immediately if it is marked.
    Otherwise repeats: pick g uniform in {0, ..., ceil(m)-1}, run g Grover
    iterations, measure, and charge ``g + b*log2(N')`` to the search time;
    the ladder grows by a factor 6/5 up to sqrt(N').  Exits when the measured
    index is marked or once the time exceeds the cutoff (checked after each
    measurement, so a round starting exactly at the cutoff still runs).

    The first round with g >= 1 queries the oracle in superposition and
    commits every open fudge pair of the pivot; from then on the marked set
    is fixed and the measurement class can be drawn directly.  Rounds before
    that point (g = 0) are literal uniform draws checked classically.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    inst_n = state.n
    n_ext = inst_n if extended_size is None else extended_size
    if n_ext < inst_n:
        raise ValueError("extended_size cannot be smaller than the list")
    rng = state.rng if rng is None else rng
    rand = rng.random
    ceil = math.ceil

    y = int(rand() * n_ext)
    if y >= n_ext:
        y = n_ext - 1
    if state.oracle_bit(pivot, y):
        return SearchOutcome(result_index=y, search_time=0.0, found_marked=True)

    m = 1.0
    sqrt_cap = math.sqrt(n_ext)
    log_term = b * math.log2(n_ext)
    t_search = 0.0
    view = table = None
    nothing_marked = False
    q_iters = 0       # Grover iterations run (two quantum queries each)
    guard_checks = 0  # classical guard checks on real, non-pivot outcomes
    while True:
        cm = ceil(m)
        g = int(rand() * cm)
        if g >= cm:
            g = cm - 1
        if view is None:
            if g == 0:
                # No oracle call happens with zero iterations: a plain uniform
                # draw, checked classically (which may decide one fudge pair).
                y = int(rand() * n_ext)
                if y >= n_ext:
                    y = n_ext - 1
                hit = bool(state.oracle_bit(pivot, y))
                t_search += log_term
                if m < sqrt_cap:
                    m = min(LAMBDA * m, sqrt_cap)
                if hit:
                    return SearchOutcome(result_index=y, search_time=t_search, found_marked=True)
                if t_search > cutoff:
                    return SearchOutcome(result_index=y, search_time=t_search, found_marked=False)
                continue
            # First round with g >= 1: the superposition query commits every
            # open fudge pair of the pivot; the marked set is fixed from here.
            view = state.marked_view(pivot, n_ext)
            table = view.sinsq_table()
            nothing_marked = view.marked_count == 0
        q_iters += g
        hit = rand() < table[g]
        if hit:
            y = view.sample_marked(rng)
        elif nothing_marked:
            y = int(rand() * n_ext)
            if y >= n_ext:
                y = n_ext - 1
        else:
            y = view.sample_unmarked(rng)
        # Guard check of the outcome: one classical query unless the measured
        # index is a dummy or the pivot itself.
        if y != pivot and y < inst_n:
            guard_checks += 1
        t_search += g + log_term
        if m < sqrt_cap:
            m = min(LAMBDA * m, sqrt_cap)
        if hit or t_search > cutoff:
            state.quantum_query_count += 2 * q_iters
            state.classical_query_count += guard_checks
            return SearchOutcome(result_index=y, search_time=t_search, found_marked=hit)
