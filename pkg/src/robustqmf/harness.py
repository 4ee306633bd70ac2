"""Experiment orchestration: seeded trials, CSV records, scaling, probes.

Every trial derives its own seed from the experiment's base seed and the
trial index through a fixed 64-bit mix (splitmix64 of ``base XOR (index+1) *
golden``), so runs are reproducible and order-independent: running trials
serially or fanned out across processes produces identical records.

Statistical convention: a probabilistic guarantee at level p checked over T
trials passes when the observed frequency is at least ``p - 3*sqrt(p(1-p)/T)``
(three binomial standard deviations below the guaranteed level).
"""

from __future__ import annotations

import math
import multiprocessing
import random
from dataclasses import dataclass, fields

import numpy as np

from . import minfind, scheffe
from .comparator import ComparatorState, STRATEGIES
from .instance import GENERATOR_KINDS, generate

CSV_SCHEMA = "# robustqmf-trials v1"
CSV_COLUMNS = ("seed", "n", "delta", "algorithm", "adversary", "trial",
               "output_index", "output_rank", "output_distance",
               "quantum_queries", "classical_queries",
               "success_rank", "success_distance")

ALGORITHMS = ("qmf", "pivot-qmf", "repeated", "robust", "tournament")

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def mix_seed(base_seed: int, index: int) -> int:
    """splitmix64 finalizer of ``base XOR (index+1)*golden``; documented and fixed."""
    z = (base_seed ^ ((index + 1) * _GOLDEN)) & _MASK
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def binomial_gate(p: float, trials: int) -> float:
    """Lowest acceptable frequency for a guarantee at level p over T trials."""
    return p - 3.0 * math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: algorithm, instance family, adversary, trial plan."""

    algorithm: str
    kind: str
    n: int
    target_delta: int
    adversary: str
    delta_prob: float
    trials: int
    base_seed: int

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.adversary not in STRATEGIES:
            raise ValueError(f"unknown adversary {self.adversary!r}")
        if self.algorithm == "qmf" and self.adversary != "exact":
            raise ValueError("the qmf algorithm only supports the exact comparator")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")

    def to_text(self) -> str:
        lines = [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name: f.type for f in fields(cls)}
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in known:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            raw[key] = value.strip()
        missing = sorted(set(known) - set(raw))
        if missing:
            raise ValueError(f"config missing keys: {missing}")
        return cls(algorithm=raw["algorithm"], kind=raw["kind"], n=int(raw["n"]),
                   target_delta=int(raw["target_delta"]), adversary=raw["adversary"],
                   delta_prob=float(raw["delta_prob"]), trials=int(raw["trials"]),
                   base_seed=int(raw["base_seed"]))


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outcome plus its query bill."""

    seed: int
    n: int
    delta: int
    algorithm: str
    adversary: str
    trial: int
    output_index: int
    output_rank: int
    output_distance: float
    quantum_queries: int
    classical_queries: int
    success_rank: bool
    success_distance: bool

    def csv_row(self) -> str:
        return ",".join((
            str(self.seed), str(self.n), str(self.delta), self.algorithm,
            self.adversary, str(self.trial), str(self.output_index),
            str(self.output_rank), repr(self.output_distance),
            str(self.quantum_queries), str(self.classical_queries),
            str(int(self.success_rank)), str(int(self.success_distance)),
        ))


def rank_success_threshold(algorithm: str, delta: int) -> int:
    """Rank level each algorithm is expected to reach."""
    if algorithm == "qmf":
        return 1
    if algorithm == "pivot-qmf":
        return 16 * (delta + 1)
    if algorithm == "tournament":
        return 4 * delta + 1  # elements within distance 2 of the minimum
    return 18 * delta + 16  # repeated and robust share the rank guarantee


def run_single_trial(config: ExperimentConfig, trial: int) -> TrialRecord:
    """Self-contained trial: fresh instance, comparator, and algorithm rng."""
    seed = mix_seed(config.base_seed, trial)
    inst = generate(config.kind, config.n, config.target_delta, seed=mix_seed(seed, 1))
    state = ComparatorState(inst, config.adversary, seed=mix_seed(seed, 2))
    delta = inst.delta().delta
    if config.algorithm == "qmf":
        out = minfind.qmf_noiseless(state)
    elif config.algorithm == "pivot-qmf":
        consts = minfind.derived_constants(config.n, delta, config.delta_prob)
        out, _ = minfind.pivot_qmf(state, delta, consts.n_trials)
    elif config.algorithm == "repeated":
        out = minfind.repeated_pivot_qmf(state, config.delta_prob, delta)
    elif config.algorithm == "tournament":
        out = minfind.min_select(state, range(config.n), config.delta_prob)
    else:
        out = minfind.robust_qmf(state, config.delta_prob, delta)
    rank = state.rank_of(out)
    distance = state.distance_to_minimum(out)
    return TrialRecord(
        seed=seed, n=config.n, delta=delta, algorithm=config.algorithm,
        adversary=config.adversary, trial=trial, output_index=out,
        output_rank=rank, output_distance=distance,
        quantum_queries=state.quantum_query_count,
        classical_queries=state.classical_query_count,
        success_rank=rank <= rank_success_threshold(config.algorithm, delta),
        success_distance=distance <= 2.0,
    )


def _trial_batch(args) -> list[TrialRecord]:
    config, indices = args
    return [run_single_trial(config, i) for i in indices]


def run_trials(config: ExperimentConfig, jobs: int = 1) -> list[TrialRecord]:
    """All trials of the config, ordered by trial index.

    ``jobs > 1`` fans trials out across processes; per-trial seeding makes
    the result identical to the serial run.
    """
    indices = list(range(config.trials))
    if jobs <= 1 or config.trials < 2:
        return [run_single_trial(config, i) for i in indices]
    chunk = max(1, config.trials // (jobs * 8))
    batches = [(config, indices[k:k + chunk]) for k in range(0, len(indices), chunk)]
    with multiprocessing.Pool(jobs) as pool:
        parts = pool.map(_trial_batch, batches)
    records = [rec for part in parts for rec in part]
    records.sort(key=lambda r: r.trial)
    return records


def records_to_csv(records) -> str:
    lines = [CSV_SCHEMA, ",".join(CSV_COLUMNS)]
    lines.extend(rec.csv_row() for rec in records)
    return "\n".join(lines) + "\n"


def write_csv(records, path: str) -> None:
    """Stream records to disk; on failure, flush what exists and mark it.

    ``records`` may be any iterable (including a lazy generator).  If writing
    or producing a record raises, the file ends with an ``# INCOMPLETE`` line
    and the error propagates.
    """
    with open(path, "w") as fh:
        fh.write(CSV_SCHEMA + "\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        try:
            for rec in records:
                fh.write(rec.csv_row() + "\n")
        except BaseException as exc:
            try:
                fh.write(f"# INCOMPLETE: {type(exc).__name__}\n")
                fh.flush()
            finally:
                raise


def success_frequency(records, distance_based: bool = False) -> float:
    if not records:
        raise ValueError("no records")
    flag = "success_distance" if distance_based else "success_rank"
    return sum(getattr(r, flag) for r in records) / len(records)


# ---------------------------------------------------------------------------
# Scaling study

@dataclass(frozen=True)
class ScalingResult:
    slope: float
    sizes: tuple[int, ...]
    mean_quantum: tuple[float, ...]
    degenerate: bool


def scaling_study(algorithm: str, n_list, delta: int, adversary: str,
                  trials_per_n: int, seed: int, delta_prob: float = 0.1,
                  jobs: int = 1, metric: str = "quantum") -> ScalingResult:
    """Least-squares slope of log2(mean query count) against log2(n).

    ``metric`` picks the counter: "quantum" (default) or "classical" (the
    relevant one for the tournament baseline, which is all-classical).
    """
    if metric not in ("quantum", "classical"):
        raise ValueError(f"unknown metric {metric!r}")
    sizes = sorted(set(int(n) for n in n_list))
    if len(sizes) < 4:
        raise ValueError("need at least 4 distinct sizes for the regression")
    kind = "uniform-spread" if delta == 0 else "clustered"
    field = "quantum_queries" if metric == "quantum" else "classical_queries"
    means = []
    for pos, n in enumerate(sizes):
        config = ExperimentConfig(algorithm=algorithm, kind=kind, n=n,
                                  target_delta=delta, adversary=adversary,
                                  delta_prob=delta_prob, trials=trials_per_n,
                                  base_seed=mix_seed(seed, pos))
        records = run_trials(config, jobs=jobs)
        means.append(sum(getattr(r, field) for r in records) / len(records))
    degenerate = len(set(means)) == 1
    if degenerate:
        return ScalingResult(0.0, tuple(sizes), tuple(means), True)
    slope = float(np.polyfit(np.log2(sizes), np.log2(means), 1)[0])
    return ScalingResult(slope, tuple(sizes), tuple(means), False)


# ---------------------------------------------------------------------------
# Rank-progress probe

@dataclass(frozen=True)
class ProgressBucket:
    """Successful-change statistics for one range of starting ranks."""

    r_lo: int
    r_hi: int
    count: int
    mean_start: float
    mean_next: float
    mean_margin: float  # mean of (next - (r + delta + 1)/2); bound is <= 0
    sigma: float
    passed: bool


@dataclass(frozen=True)
class ProgressReport:
    buckets: tuple[ProgressBucket, ...]
    converged_samples: int
    converged_max_next: int
    converged_bound: int
    converged_ok: bool

    @property
    def all_passed(self) -> bool:
        return self.converged_ok and all(b.passed for b in self.buckets)


def progress_probe(n: int, delta: int, trials: int, seed: int,
                   adversary: str = "mark-all-below") -> ProgressReport:
    """Empirical check of per-step rank progress of successful pivot changes.

    Above the convergence zone (start rank > 3*(delta+1)) the mean landing
    rank must stay below (r + delta + 1)/2, up to 3 standard errors; inside
    the zone every landing rank is at most 4*delta + 3, deterministically.
    """
    if n <= 3 * (delta + 1):
        raise ValueError("probe needs n > 3*(delta+1)")
    kind = "uniform-spread" if delta == 0 else "grid"
    boundary = 3 * (delta + 1)
    ceiling = 4 * delta + 3
    margins: dict[int, list[float]] = {}
    starts: dict[int, list[int]] = {}
    nexts: dict[int, list[int]] = {}
    converged_next: list[int] = []
    for trial in range(trials):
        t_seed = mix_seed(seed, trial)
        inst = generate(kind, n, delta, seed=mix_seed(t_seed, 1))
        state = ComparatorState(inst, adversary, seed=mix_seed(t_seed, 2))
        consts = minfind.derived_constants(n, delta, 0.1)
        _, trace = minfind.pivot_qmf(state, delta, consts.n_trials)
        for r_before, r_after in trace.transitions():
            if r_before > boundary:
                b = r_before.bit_length()  # geometric bucket [2^(b-1), 2^b)
                margins.setdefault(b, []).append(r_after - (r_before + delta + 1) / 2.0)
                starts.setdefault(b, []).append(r_before)
                nexts.setdefault(b, []).append(r_after)
            else:
                converged_next.append(r_after)
    buckets = []
    for b in sorted(margins):
        vals = margins[b]
        count = len(vals)
        if count < 2:
            continue  # excluded: too sparse for a standard error
        mean_margin = sum(vals) / count
        sigma = float(np.std(vals, ddof=1)) / math.sqrt(count)
        buckets.append(ProgressBucket(
            r_lo=1 << (b - 1), r_hi=(1 << b) - 1, count=count,
            mean_start=sum(starts[b]) / count, mean_next=sum(nexts[b]) / count,
            mean_margin=mean_margin, sigma=sigma,
            passed=mean_margin <= 3.0 * sigma,
        ))
    converged_max = max(converged_next) if converged_next else 0
    return ProgressReport(
        buckets=tuple(buckets),
        converged_samples=len(converged_next),
        converged_max_next=converged_max,
        converged_bound=ceiling,
        converged_ok=converged_max <= ceiling,
    )


# ---------------------------------------------------------------------------
# Hypothesis-selection trials

@dataclass(frozen=True)
class HypothesisTrialRecord:
    """One end-to-end selection run against a fixed candidate family."""

    seed: int
    n: int
    delta: int
    trial: int
    output_index: int
    output_rank: int
    output_l1: float
    bound_l1: float
    quantum_queries: int
    classical_queries: int
    cost_units: int
    success: bool

    def csv_row(self) -> str:
        return ",".join((
            str(self.seed), str(self.n), str(self.delta), "hypothesis", "scheffe",
            str(self.trial), str(self.output_index), str(self.output_rank),
            repr(self.output_l1), str(self.quantum_queries),
            str(self.classical_queries), str(int(self.success)), str(self.cost_units),
        ))


def hypothesis_trials(hypotheses, target, epsilon: float, delta_prob: float,
                      trials: int, base_seed: int,
                      sample_count: int | None = None) -> list[HypothesisTrialRecord]:
    """Repeated selection runs: fixed candidates, fresh samples per trial.

    Success means the chosen candidate is within ``9*min + epsilon`` of the
    target in L1, the end-to-end guarantee at level ``1 - delta_prob``.
    """
    probe = scheffe.HypothesisSet(hypotheses, target, 1, seed=0)
    delta = probe.fudge_delta()
    ranks = probe.ground_truth_ranks()
    dists = probe.distances()
    bound = 9.0 * min(dists) + epsilon
    if sample_count is None:
        sample_count = scheffe.required_samples(len(hypotheses), delta_prob, epsilon)
    records = []
    for trial in range(trials):
        seed = mix_seed(base_seed, trial)
        hset = scheffe.HypothesisSet(hypotheses, target, sample_count,
                                     seed=mix_seed(seed, 1))
        state = scheffe.ScheffeComparatorState(hset, seed=mix_seed(seed, 2))
        out = scheffe.hypothesis_select(hset, delta_prob, delta, state=state)
        records.append(HypothesisTrialRecord(
            seed=seed, n=len(hypotheses), delta=delta, trial=trial,
            output_index=out, output_rank=ranks[out], output_l1=dists[out],
            bound_l1=bound, quantum_queries=state.quantum_query_count,
            classical_queries=state.classical_query_count,
            cost_units=hset.cost_units, success=dists[out] <= bound,
        ))
    return records


def hypothesis_records_to_csv(records) -> str:
    columns = ("seed", "n", "delta", "algorithm", "adversary", "trial",
               "output_index", "output_rank", "output_l1",
               "quantum_queries", "classical_queries", "success", "cost_units")
    lines = [CSV_SCHEMA, ",".join(columns)]
    lines.extend(rec.csv_row() for rec in records)
    return "\n".join(lines) + "\n"
