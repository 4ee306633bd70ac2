"""Hypothesis selection: discrete distributions, Scheffe machinery, pipeline.

Given N known candidate distributions and samples from an unknown target q,
the Scheffe test compares two candidates by how well their predicted mass on
the set where one dominates the other matches the empirical mass of the
samples.  With the samples fixed, the test is a deterministic pairwise
comparator; on the log scale ``x_i = -log3 ||p_i - q||_1`` it behaves like a
unit-resolution noisy comparator (it reliably picks the closer hypothesis
only when the two L1 distances differ by more than a factor of 3), which is
exactly the setting the minimum-finding algorithms are built for.

Cost model: one membership query of a domain point against a dominance set
costs EO_S, one mass query costs EO_P, one target sample costs EO_Q.  A
single test over K samples costs ``K * (EO_S + 1) + 2 * EO_P`` units.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import comparator, minfind

EO_S = 1  # unit cost: membership test of one point
EO_P = 1  # unit cost: one mass query
EO_Q = 1  # unit cost: one sample draw

PMF_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability mass function over the finite domain {0, ..., D-1}."""

    pmf: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pmf, dtype=float)
        object.__setattr__(self, "pmf", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pmf must be a non-empty 1-d array")
        if (arr < 0).any():
            raise ValueError("pmf entries must be non-negative")
        if abs(float(arr.sum()) - 1.0) > PMF_TOL:
            raise ValueError(f"pmf sums to {arr.sum()!r}, not 1")

    @property
    def domain_size(self) -> int:
        return int(self.pmf.size)

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return rng.choice(self.domain_size, size=k, p=self.pmf)


def scheffe_set(p_i: DiscreteDistribution, p_j: DiscreteDistribution) -> frozenset[int]:
    """Domain points where p_i has strictly larger mass than p_j."""
    _check_same_domain(p_i, p_j)
    return frozenset(int(x) for x in np.nonzero(p_i.pmf > p_j.pmf)[0])


def mass(p: DiscreteDistribution, s) -> float:
    """Total mass of p on the subset s of the domain."""
    idx = sorted(s)
    if idx and not (0 <= idx[0] and idx[-1] < p.domain_size):
        raise ValueError("subset contains points outside the domain")
    return float(p.pmf[idx].sum()) if idx else 0.0


def empirical_mass(samples, s) -> float:
    """Fraction of samples that land in s."""
    samples = list(samples)
    if not samples:
        raise ValueError("empirical mass needs at least one sample")
    member = set(s)
    return sum(1 for x in samples if x in member) / len(samples)


def l1_distance(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    _check_same_domain(p, q)
    return float(np.abs(p.pmf - q.pmf).sum())


def x_value(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Log-scale value -log3 ||p - q||_1; undefined at distance zero."""
    dist = l1_distance(p, q)
    if dist <= 0.0:
        raise ValueError("x_value undefined for identical distributions (handled out of band)")
    return -math.log(dist) / math.log(3.0)


def required_samples(n: int, delta_prob: float, epsilon: float) -> int:
    """Smallest K making the end-to-end additive error at most epsilon."""
    if n < 2:
        raise ValueError("need at least two hypotheses")
    if not 0.0 < delta_prob < 1.0:
        raise ValueError("delta_prob must lie in (0, 1)")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    pairs = n * (n - 1) // 2
    return math.ceil(160.0 * math.log2(pairs / delta_prob) / epsilon**2)


def _check_same_domain(p: DiscreteDistribution, q: DiscreteDistribution) -> None:
    if p.domain_size != q.domain_size:
        raise ValueError(f"domain mismatch: {p.domain_size} vs {q.domain_size}")


class HypothesisSet:
    """N candidate distributions, the target q, and a fixed sample multiset.

    The samples are drawn once at construction and never refreshed; everything
    downstream (the test outcomes, hence the whole selection run) is a
    deterministic function of them.  Cost counters tally the access-model
    units defined at module level.
    """

    def __init__(self, hypotheses: list[DiscreteDistribution],
                 target: DiscreteDistribution, sample_count: int, seed: int = 0):
        if len(hypotheses) < 2:
            raise ValueError("need at least two hypotheses")
        for h in hypotheses:
            _check_same_domain(h, target)
        if sample_count < 1:
            raise ValueError("need at least one sample")
        self.hypotheses = list(hypotheses)
        self.target = target
        rng = np.random.default_rng(seed)
        self.samples = target.sample(rng, sample_count)
        counts = np.bincount(self.samples, minlength=target.domain_size)
        self._sample_counts = counts.astype(float)
        self.eo_s_count = 0
        self.eo_p_count = 0
        self.eo_q_count = sample_count * EO_Q
        self.cost_units = sample_count * EO_Q

    @property
    def n(self) -> int:
        return len(self.hypotheses)

    @property
    def sample_count(self) -> int:
        return int(self.samples.size)

    def scheffe_test(self, i: int, j: int) -> int:
        """Deterministic winner of the pairwise test; i wins ties.

        Tests each sample against the dominance set of (i, j), queries both
        predicted masses, and picks the hypothesis whose mass is closer to
        the empirical one.  Adds ``K*(EO_S+1) + 2*EO_P`` cost units.
        """
        if i == j:
            raise ValueError("scheffe_test requires two distinct hypotheses")
        k = self.sample_count
        p_i, p_j = self.hypotheses[i], self.hypotheses[j]
        dominates = p_i.pmf > p_j.pmf
        mu = float(self._sample_counts[dominates].sum()) / k
        mass_i = float(p_i.pmf[dominates].sum())
        mass_j = float(p_j.pmf[dominates].sum())
        self.eo_s_count += k * EO_S
        self.eo_p_count += 2 * EO_P
        self.cost_units += k * (EO_S + 1) + 2 * EO_P
        return i if abs(mass_i - mu) <= abs(mass_j - mu) else j

    def distances(self) -> list[float]:
        return [l1_distance(h, self.target) for h in self.hypotheses]

    def x_values(self) -> list[float | None]:
        """Log-scale values; None flags hypotheses identical to the target."""
        out: list[float | None] = []
        for h in self.hypotheses:
            d = l1_distance(h, self.target)
            out.append(None if d <= 0.0 else -math.log(d) / math.log(3.0))
        return out

    def ground_truth_ranks(self) -> list[int]:
        """Rank 1 = closest to the target (distance ties broken by index)."""
        dists = self.distances()
        order = sorted(range(self.n), key=lambda i: (dists[i], i))
        ranks = [0] * self.n
        for pos, idx in enumerate(order):
            ranks[idx] = pos + 1
        return ranks

    def fudge_delta(self) -> int:
        """Density bound from the log-scale fudge zones (ratio within 3x)."""
        dists = self.distances()
        worst = 0
        for i in range(self.n):
            size = 0
            for j in range(self.n):
                if j != i and _in_fudge(dists[i], dists[j]):
                    size += 1
            worst = max(worst, size)
        return math.ceil(worst / 2)

    def min_level_gap(self) -> float:
        """Smallest gap between distinct log-scale levels (ties tolerated)."""
        xs = sorted(x for x in self.x_values() if x is not None)
        gaps = [b - a for a, b in zip(xs, xs[1:]) if b - a > 1e-6]
        return min(gaps) if gaps else math.inf


def _in_fudge(d_i: float, d_j: float) -> bool:
    """Log-scale distance-1 test: L1 distances within a factor of 3."""
    if d_i <= 0.0 or d_j <= 0.0:
        return False
    lo, hi = min(d_i, d_j), max(d_i, d_j)
    return hi <= 3.0 * lo


class ScheffeComparatorState:
    """Adapter exposing a hypothesis set as a noisy comparator.

    Outcomes are memoized: repeated queries on a pair never rerun the test
    (it is deterministic given the fixed samples).  A superposition query
    with pivot i evaluates and memoizes the whole row i at once.
    """

    def __init__(self, hset: HypothesisSet, seed: int = 0):
        self.hset = hset
        self.rng = random.Random(seed)
        self.memo: dict[tuple[int, int], int] = {}
        self.classical_query_count = 0
        self.quantum_query_count = 0
        self._view_cache: dict[tuple[int, int], "ScheffeMarkedView"] = {}
        self._ranks = hset.ground_truth_ranks()
        dists = hset.distances()
        self._dists = dists
        self._dist_min = min(dists)

    @property
    def n(self) -> int:
        return self.hset.n

    def _winner(self, i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        w = self.memo.get(key)
        if w is None:
            w = self.hset.scheffe_test(key[0], key[1])
            self.memo[key] = w
        return w

    def compare(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("compare requires two distinct indices")
        self.classical_query_count += 1
        return self._winner(i, j)

    def oracle_bit(self, pivot: int, j: int) -> int:
        if j >= self.hset.n:
            return 1
        if j == pivot:
            return 0
        return 1 if self.compare(pivot, j) == j else 0

    def marked_view(self, pivot: int, n_ext: int | None = None) -> "ScheffeMarkedView":
        n = self.hset.n
        n_ext = n if n_ext is None else n_ext
        cached = self._view_cache.get((pivot, n_ext))
        if cached is not None:
            return cached
        marked = [j for j in range(n) if j != pivot and self._winner(pivot, j) == j]
        view = ScheffeMarkedView(pivot, n, n_ext, marked)
        self._view_cache[(pivot, n_ext)] = view
        return view

    def marked_set(self, pivot: int, list_size: int | None = None):
        view = self.marked_view(pivot, list_size)
        return view.as_frozenset()

    def rank_of(self, j: int) -> int:
        return self._ranks[j]

    def distance_to_minimum(self, j: int) -> float:
        return self._dists[j] - self._dist_min


class ScheffeMarkedView:
    """Materialized marked set with the sampling interface the search needs."""

    __slots__ = ("pivot", "n_real", "n_ext", "marked_count", "theta", "_marked",
                 "_unmarked", "_table")

    def __init__(self, pivot: int, n_real: int, n_ext: int, marked_real: list[int]):
        self.pivot = pivot
        self.n_real = n_real
        self.n_ext = n_ext
        self._marked = marked_real
        marked_lookup = set(marked_real)
        self._unmarked = [j for j in range(n_real) if j not in marked_lookup and j != pivot]
        self._unmarked.append(pivot)
        self.marked_count = len(marked_real) + (n_ext - n_real)
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
        if self._table is None:
            self._table = comparator.sinsq_table(self.theta, self.marked_count, self.n_ext)
        return self._table

    def sample_marked(self, rng: random.Random) -> int:
        r = int(rng.random() * self.marked_count)
        if r >= self.marked_count:
            r = self.marked_count - 1
        if r < len(self._marked):
            return self._marked[r]
        return self.n_real + (r - len(self._marked))

    def sample_unmarked(self, rng: random.Random) -> int:
        n_unmarked = len(self._unmarked)
        r = int(rng.random() * n_unmarked)
        if r >= n_unmarked:
            r = n_unmarked - 1
        return self._unmarked[r]

    def as_frozenset(self) -> frozenset[int]:
        return frozenset(self._marked) | frozenset(range(self.n_real, self.n_ext))


def hypothesis_select(hset: HypothesisSet, delta_prob: float, delta_density: int,
                      seed: int = 0, state: "ScheffeComparatorState | None" = None) -> int:
    """Run the full selection pipeline; returns the chosen hypothesis index.

    Wraps the hypothesis set as a noisy comparator and runs the robust
    minimum-finding pipeline over it.  Tiny instances that fall below the
    pipeline's size precondition degrade to the plain tournament (for N = 2
    that is a single pairwise test).  Pass ``state`` to keep access to the
    query counters afterwards.
    """
    if state is None:
        state = ScheffeComparatorState(hset, seed=seed)
    if hset.n <= 2 * (1 + delta_density) or hset.n < 3:
        return minfind.min_select(state, range(hset.n), delta_prob)
    return minfind.robust_qmf(state, delta_prob, delta_density)


# ---------------------------------------------------------------------------
# Generators

def gaussian_pmf(domain: int, center: float, sigma: float) -> DiscreteDistribution:
    """Discretized bell curve, clipped to the domain and renormalized."""
    xs = np.arange(domain, dtype=float)
    w = np.exp(-0.5 * ((xs - center) / sigma) ** 2)
    return DiscreteDistribution(w / w.sum())


def gridded_hypotheses(n: int, domain: int, seed: int, x_gap: float = 0.7,
                       d_max: float = 1.5, sigma_frac: float = 0.09,
                       sample_count: int | None = None,
                       epsilon: float | None = None,
                       delta_prob: float = 0.1) -> HypothesisSet:
    """Location family around the target, with geometric distance levels.

    Hypothesis 0 is the target itself.  The remaining n-1 hypotheses split
    into levels at L1 distances ``d_max * 3**(-x_gap * level)``; within each
    level, distinct shapes (shift direction and slight width changes) are
    calibrated by bisection to hit the level distance exactly, so the
    log-scale values form clean levels separated by ``x_gap``.
    """
    if n < 3:
        raise ValueError("gridded family needs n >= 3")
    if domain < 8:
        raise ValueError("domain too small for the bell-curve family")
    levels = _pick_level_count(n - 1)
    per_level = (n - 1) // levels
    sigma = sigma_frac * domain
    center = (domain - 1) / 2.0
    target = gaussian_pmf(domain, center, sigma)
    hypotheses = [target]
    for level in range(levels):
        d_target = d_max * 3.0 ** (-x_gap * level)
        hypotheses.extend(
            _level_members(domain, center, sigma, d_target, per_level, target))
    if epsilon is None:
        epsilon = 0.8 * x_gap
    if sample_count is None:
        sample_count = required_samples(n, delta_prob, epsilon)
    return HypothesisSet(hypotheses, target, sample_count, seed=seed)


def _pick_level_count(m: int) -> int:
    """Divisor of m closest to 15 keeps levels few and multiplicity high."""
    divisors = [d for d in range(1, m + 1) if m % d == 0]
    return min(divisors, key=lambda d: (abs(d - 15), d))


def _level_members(domain: int, center: float, sigma: float, d_target: float,
                   count: int, target: DiscreteDistribution) -> list[DiscreteDistribution]:
    members = []
    slot = 0
    while len(members) < count:
        sign = 1.0 if slot % 2 == 0 else -1.0
        width = 1.0 + (slot // 2) * min(0.02, d_target / 25.0)
        members.append(_calibrated_member(domain, center, sigma * width, sign, d_target, target))
        slot += 1
    return members


def _calibrated_member(domain: int, center: float, sigma: float, sign: float,
                       d_target: float, target: DiscreteDistribution) -> DiscreteDistribution:
    """Bisect the shift so the discretized pmf sits at the target L1 distance."""

    def dist_at(u: float) -> float:
        return l1_distance(gaussian_pmf(domain, center + sign * u, sigma), target)

    lo, hi = 0.0, domain / 2.0
    if dist_at(hi) < d_target:
        raise ValueError(f"distance {d_target} unreachable within the domain")
    if dist_at(lo) > d_target:
        raise ValueError(f"width change alone overshoots distance {d_target}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dist_at(mid) < d_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return gaussian_pmf(domain, center + sign * hi, sigma)


def mixture_hypotheses(n: int, domain: int, seed: int, concentration: float = 1.0,
                       sample_count: int = 10000) -> HypothesisSet:
    """Unstructured family: Dirichlet-random pmfs plus a Dirichlet target."""
    rng = np.random.default_rng(seed)
    alpha = np.full(domain, concentration)
    hypotheses = [DiscreteDistribution(rng.dirichlet(alpha)) for _ in range(n)]
    target = DiscreteDistribution(rng.dirichlet(alpha))
    return HypothesisSet(hypotheses, target, sample_count, seed=seed + 1)


# ---------------------------------------------------------------------------
# File format: header "# n=<N> d=<D>", one pmf per line, target prefixed "q:"

def save_hypotheses(hset: HypothesisSet, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={hset.n} d={hset.target.domain_size}\n")
        for h in hset.hypotheses:
            fh.write(" ".join(repr(float(v)) for v in h.pmf) + "\n")
        fh.write("q: " + " ".join(repr(float(v)) for v in hset.target.pmf) + "\n")


def load_hypotheses(path: str, sample_count: int, seed: int = 0) -> HypothesisSet:
    hypotheses: list[DiscreteDistribution] = []
    target = None
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing header line")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("q:"):
                target = DiscreteDistribution(np.array([float(v) for v in line[2:].split()]))
            else:
                hypotheses.append(DiscreteDistribution(np.array([float(v) for v in line.split()])))
    if target is None:
        raise ValueError(f"{path}: no target line (prefix 'q:')")
    return HypothesisSet(hypotheses, target, sample_count, seed=seed)
