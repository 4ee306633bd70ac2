"""The twelve release criteria, each pinned to its stated tolerance.

Every criterion is a zero-argument callable returning a
:class:`CriterionResult`; probabilistic guarantees are checked one-sided at
three binomial standard deviations below the guaranteed level (see
:func:`robustqmf.harness.binomial_gate`).  Seeds are fixed so the suite is
reproducible end to end.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

from . import harness, minfind, scheffe
from .comparator import ComparatorState
from .grover import GroverParams, qsearch_with_cutoff, statevector_reference, success_probability
from .harness import ExperimentConfig, binomial_gate, mix_seed, run_trials
from .instance import Instance, generate

BASE_SEED = 20240901


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime_s: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:02d} {self.name}: {self.detail} ({self.runtime_s:.1f}s)"


def _result(number: int, name: str, passed: bool, detail: str, t0: float) -> CriterionResult:
    return CriterionResult(number, name, passed, detail, time.perf_counter() - t0)


def criterion_01_grover_model() -> CriterionResult:
    """Analytic class probability matches the dense statevector to 1e-10."""
    t0 = time.perf_counter()
    tol = 1e-10
    worst = 0.0
    for size in (4, 8, 16, 32):
        for t in range(size + 1):
            marked = list(range(t))
            for g in range(13):
                probs = statevector_reference(size, marked, g)
                analytic = success_probability(GroverParams(size, t, g))
                worst = max(worst, abs(float(probs[:t].sum()) - analytic))
                if t:
                    worst = max(worst, float(abs(probs[:t] - probs[:t].mean()).max()))
                if t < size:
                    worst = max(worst, float(abs(probs[t:] - probs[t:].mean()).max()))
    return _result(1, "grover-model-validity", worst <= tol,
                   f"max deviation {worst:.2e} (tolerance {tol:.0e})", t0)


def criterion_02_search_expectation(trials: int = 10_000) -> CriterionResult:
    """Mean iterations of uncapped search at rank 2 stays within 5% of 144."""
    t0 = time.perf_counter()
    n = 1024
    bound = 4.5 * math.sqrt(n / 1.0) * 1.05
    inst = generate("uniform-spread", n, 0, seed=mix_seed(BASE_SEED, 777))
    pivot = inst.index_of_rank(2)
    total = 0.0
    for trial in range(trials):
        state = ComparatorState(inst, "exact", seed=mix_seed(BASE_SEED, trial))
        total += qsearch_with_cutoff(state, pivot, math.inf).search_time
    mean = total / trials
    return _result(2, "search-expectation", mean <= bound,
                   f"mean iterations {mean:.1f} <= {bound:.1f}", t0)


def criterion_03_cutoff_success(trials: int = 10_000) -> CriterionResult:
    """Capped search finds a marked element at least half the time.

    Ranks start at max(2*delta+1, 2): a rank-1 pivot under the exact
    comparator marks nothing and can never succeed, so the guarantee is
    only meaningful above it.
    """
    t0 = time.perf_counter()
    n = 4096
    failures = []
    details = []
    for delta in (0, 2, 8):
        kind = "uniform-spread" if delta == 0 else "grid"
        inst = generate(kind, n, delta, seed=mix_seed(BASE_SEED, 1000 + delta))
        cutoff = 9.0 * math.sqrt(n / (1 + delta))
        ranks = sorted({max(2 * delta + 1, 2), 4 * (delta + 1), 64, 1024})
        for rank, strategy in itertools.product(ranks, ("exact", "mark-all-below")):
            pivot = inst.index_of_rank(rank)
            hits = 0
            for trial in range(trials):
                state = ComparatorState(inst, strategy, seed=mix_seed(BASE_SEED, trial))
                hits += qsearch_with_cutoff(state, pivot, cutoff).found_marked
            freq = hits / trials
            gate = binomial_gate(0.5, trials)
            details.append(f"d={delta} r={rank} {strategy}: {freq:.3f}")
            if freq < gate:
                failures.append(f"d={delta} r={rank} {strategy}: {freq:.3f} < {gate:.3f}")
    passed = not failures
    detail = "; ".join(failures) if failures else f"all {len(details)} combos >= {binomial_gate(0.5, trials):.3f}"
    return _result(3, "cutoff-success-probability", passed, detail, t0)


def criterion_04_noiseless_qmf(trials: int = 10_000) -> CriterionResult:
    """Total-time-budgeted minimum finding succeeds with probability 1/2."""
    t0 = time.perf_counter()
    failures = []
    for n in (64, 256):
        config = ExperimentConfig(algorithm="qmf", kind="uniform-spread", n=n,
                                  target_delta=0, adversary="exact", delta_prob=0.1,
                                  trials=trials, base_seed=mix_seed(BASE_SEED, n))
        freq = harness.success_frequency(run_trials(config))
        gate = binomial_gate(0.5, trials)
        if freq < gate:
            failures.append(f"n={n}: {freq:.3f} < {gate:.3f}")
    return _result(4, "noiseless-qmf", not failures,
                   "; ".join(failures) if failures else f"both sizes >= {binomial_gate(0.5, trials):.3f}", t0)


ADVERSARY_GRID = ("exact", "mark-all-below", "mark-none-below", "random-adaptive")


def criterion_05_pivot_qmf(trials: int = 10_000) -> CriterionResult:
    """Attempt-capped search lands within rank 16*(delta+1) w.p. 3/4."""
    t0 = time.perf_counter()
    n = 4096
    failures = []
    freqs = []
    for delta in (0, 1, 4):
        kind = "uniform-spread" if delta == 0 else "clustered"
        for adversary in ADVERSARY_GRID:
            config = ExperimentConfig(algorithm="pivot-qmf", kind=kind, n=n,
                                      target_delta=delta, adversary=adversary,
                                      delta_prob=0.1, trials=trials,
                                      base_seed=mix_seed(BASE_SEED, 50 + delta))
            freq = harness.success_frequency(run_trials(config))
            gate = binomial_gate(0.75, trials)
            freqs.append(freq)
            if freq < gate:
                failures.append(f"d={delta} {adversary}: {freq:.3f} < {gate:.3f}")
    detail = "; ".join(failures) if failures else \
        f"12 combos, min freq {min(freqs):.3f} >= {binomial_gate(0.75, trials):.3f}"
    return _result(5, "pivot-qmf-rank", not failures, detail, t0)


def criterion_06_progress(trials: int = 800) -> CriterionResult:
    """Per-step progress bounds of successful pivot changes.

    Uses the balanced grid family (at most delta fudge neighbors per side),
    the regime in which the converged-zone ceiling 4*delta+3 is exact.
    """
    t0 = time.perf_counter()
    report = harness.progress_probe(n=4096, delta=10, trials=trials,
                                    seed=mix_seed(BASE_SEED, 6), adversary="mark-all-below")
    parts = [f"r in [{b.r_lo},{b.r_hi}]: margin {b.mean_margin:.2f} vs 3sig {3 * b.sigma:.2f} (x{b.count})"
             for b in report.buckets]
    parts.append(f"converged: max next {report.converged_max_next} <= {report.converged_bound} "
                 f"(x{report.converged_samples})")
    return _result(6, "progress-bounds", report.all_passed, "; ".join(parts), t0)


def criterion_07_repeated(trials: int = 2000) -> CriterionResult:
    """Boosted search reaches rank 18*delta+16 w.p. 1-delta_prob."""
    t0 = time.perf_counter()
    n = 4096
    failures = []
    freqs = []
    for delta in (0, 4):
        kind = "uniform-spread" if delta == 0 else "clustered"
        for adversary in ADVERSARY_GRID:
            config = ExperimentConfig(algorithm="repeated", kind=kind, n=n,
                                      target_delta=delta, adversary=adversary,
                                      delta_prob=0.1, trials=trials,
                                      base_seed=mix_seed(BASE_SEED, 70 + delta))
            freq = harness.success_frequency(run_trials(config))
            gate = binomial_gate(0.9, trials)
            freqs.append(freq)
            if freq < gate:
                failures.append(f"d={delta} {adversary}: {freq:.3f} < {gate:.3f}")
    detail = "; ".join(failures) if failures else \
        f"8 combos, min freq {min(freqs):.3f} >= {binomial_gate(0.9, trials):.3f}"
    return _result(7, "repeated-pivot-qmf", not failures, detail, t0)


def criterion_08_robust(trials: int = 2000) -> CriterionResult:
    """Full pipeline outputs a distance-2 approximation w.p. 1-delta_prob."""
    t0 = time.perf_counter()
    n = 4096
    failures = []
    freqs = []
    for delta in (0, 4):
        kind = "uniform-spread" if delta == 0 else "clustered"
        for adversary in ADVERSARY_GRID:
            config = ExperimentConfig(algorithm="robust", kind=kind, n=n,
                                      target_delta=delta, adversary=adversary,
                                      delta_prob=0.1, trials=trials,
                                      base_seed=mix_seed(BASE_SEED, 90 + delta))
            freq = harness.success_frequency(run_trials(config), distance_based=True)
            gate = binomial_gate(0.9, trials)
            freqs.append(freq)
            if freq < gate:
                failures.append(f"d={delta} {adversary}: {freq:.3f} < {gate:.3f}")
    # Deterministic clause: when the stage-one winner is already the true
    # minimum, the sweep collects nothing real and the output is that winner.
    inst = generate("uniform-spread", 512, 0, seed=mix_seed(BASE_SEED, 95))
    state = ComparatorState(inst, "exact", seed=mix_seed(BASE_SEED, 96))
    y_min = inst.minimum()
    pool = minfind.robust_stage2_pool(state, y_min, 0.1, 0)
    if pool != {y_min}:
        failures.append(f"minimum-pivot sweep pool {sorted(pool)} != [{y_min}]")
    elif minfind.min_select(state, pool, 0.025) != y_min:
        failures.append("minimum-pivot path did not return the stage-one winner")
    detail = "; ".join(failures) if failures else \
        f"8 combos, min freq {min(freqs):.3f} >= {binomial_gate(0.9, trials):.3f}; minimum-pivot path exact"
    return _result(8, "robust-qmf-approximation", not failures, detail, t0)


def criterion_09_tournament() -> CriterionResult:
    """Tournament selection is a 2-approximation for every decision table.

    Enumerates pools of size 2..6 over a grid of gap patterns (mixing fudge
    and forced pairs) and, for each, all 2^f assignments of the fudge pairs;
    the assignment is installed as a pre-filled ledger.
    """
    t0 = time.perf_counter()
    checked = 0
    worst = 0.0
    for size in range(2, 7):
        for gaps in itertools.product((0.4, 0.9, 2.0), repeat=size - 1):
            values = [0.0]
            for gap in gaps:
                values.append(values[-1] + gap)
            inst = Instance(values)
            fudge_pairs = [(i, j) for i in range(size) for j in range(i + 1, size)
                           if abs(values[i] - values[j]) <= 1.0]
            for bits in range(1 << len(fudge_pairs)):
                state = ComparatorState(inst, "random-adaptive", seed=0)
                for k, (i, j) in enumerate(fudge_pairs):
                    state.ledger[(i, j)] = j if (bits >> k) & 1 else i
                winner = minfind.min_select(state, range(size), 0.1)
                gap_to_min = values[winner] - min(values)
                worst = max(worst, gap_to_min)
                checked += 1
                if gap_to_min > 2.0:
                    return _result(9, "tournament-contract", False,
                                   f"values {values} bits {bits:b}: winner at distance {gap_to_min}", t0)
    return _result(9, "tournament-contract", True,
                   f"{checked} adversary tables checked, worst distance {worst:.2f} <= 2", t0)


def criterion_10_scaling(trials_per_n: int = 200) -> CriterionResult:
    """Quantum query growth of the full pipeline is square-root-like."""
    t0 = time.perf_counter()
    result = harness.scaling_study("robust", [2 ** k for k in range(8, 15)], 0,
                                   "exact", trials_per_n, seed=mix_seed(BASE_SEED, 10))
    ok = not result.degenerate and 0.40 <= result.slope <= 0.65
    means = ", ".join(f"{m:.0f}" for m in result.mean_quantum)
    return _result(10, "query-scaling", ok,
                   f"slope {result.slope:.3f} in [0.40, 0.65]; means [{means}]", t0)


def criterion_11_hypothesis(trials: int = 500) -> CriterionResult:
    """End-to-end selection guarantee on the gridded family, plus cost tally."""
    t0 = time.perf_counter()
    n, domain, delta_prob, x_gap = 256, 64, 0.1, 0.7
    family = scheffe.gridded_hypotheses(n, domain, seed=0, x_gap=x_gap)
    hypotheses, target = family.hypotheses, family.target
    min_gap = family.min_level_gap()
    epsilon = 0.8 * x_gap
    if epsilon >= min_gap:
        return _result(11, "hypothesis-selection", False,
                       f"epsilon {epsilon} not below min level gap {min_gap}", t0)
    records = harness.hypothesis_trials(hypotheses, target, epsilon, delta_prob,
                                        trials, base_seed=mix_seed(BASE_SEED, 11))
    freq = sum(r.success for r in records) / len(records)
    gate = binomial_gate(1 - delta_prob, trials)
    # Cost-model clause: one test must bill exactly K*(EO_S+1) + 2*EO_P units.
    hset = scheffe.HypothesisSet(hypotheses, target, 1234, seed=3)
    before = hset.cost_units
    hset.scheffe_test(0, 1)
    billed = hset.cost_units - before
    expected = hset.sample_count * (scheffe.EO_S + 1) + 2 * scheffe.EO_P
    cost_ok = billed == expected
    passed = freq >= gate and cost_ok
    return _result(11, "hypothesis-selection", passed,
                   f"freq {freq:.3f} >= {gate:.3f} (eps {epsilon:.2f} < gap {min_gap:.2f}); "
                   f"cost {billed} == {expected}: {cost_ok}", t0)


def criterion_12_determinism() -> CriterionResult:
    """Identical configs produce byte-identical CSV output."""
    t0 = time.perf_counter()
    config = ExperimentConfig(algorithm="robust", kind="clustered", n=128,
                              target_delta=2, adversary="random-adaptive",
                              delta_prob=0.2, trials=25, base_seed=BASE_SEED)
    csv_a = harness.records_to_csv(run_trials(config))
    csv_b = harness.records_to_csv(run_trials(config))
    h_rec_a = harness.hypothesis_trials(*_small_family(), 0.5, 0.2, 5, BASE_SEED)
    h_rec_b = harness.hypothesis_trials(*_small_family(), 0.5, 0.2, 5, BASE_SEED)
    same = csv_a == csv_b and harness.hypothesis_records_to_csv(h_rec_a) == \
        harness.hypothesis_records_to_csv(h_rec_b)
    return _result(12, "determinism", same,
                   "repeat runs byte-identical" if same else "outputs differ between identical runs", t0)


def _small_family():
    family = scheffe.gridded_hypotheses(31, 32, seed=5, x_gap=0.8, sample_count=500)
    return family.hypotheses, family.target


ALL_CRITERIA = (
    criterion_01_grover_model,
    criterion_02_search_expectation,
    criterion_03_cutoff_success,
    criterion_04_noiseless_qmf,
    criterion_05_pivot_qmf,
    criterion_06_progress,
    criterion_07_repeated,
    criterion_08_robust,
    criterion_09_tournament,
    criterion_10_scaling,
    criterion_11_hypothesis,
    criterion_12_determinism,
)


def run_all(numbers=None) -> list[CriterionResult]:
    results = []
    for pos, fn in enumerate(ALL_CRITERIA, start=1):
        if numbers is not None and pos not in numbers:
            continue
        res = fn()
        results.append(res)
        print(res.line(), flush=True)
    return results
