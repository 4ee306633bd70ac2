import itertools
import math

import numpy as np
import pytest

from robustqmf import scheffe
from robustqmf.scheffe import (DiscreteDistribution, HypothesisSet,
                               ScheffeComparatorState, empirical_mass,
                               gridded_hypotheses, hypothesis_select, l1_distance,
                               load_hypotheses, mass, mixture_hypotheses,
                               required_samples, save_hypotheses, scheffe_set,
                               x_value)


def dist(*pmf):
    return DiscreteDistribution(np.array(pmf, dtype=float))


def test_distribution_validation():
    with pytest.raises(ValueError):
        dist(0.5, 0.6)
    with pytest.raises(ValueError):
        dist(1.2, -0.2)
    d = dist(0.25, 0.75)
    assert d.domain_size == 2


def test_scheffe_set_examples():
    p = dist(0.9, 0.1)
    q = dist(0.1, 0.9)
    assert scheffe_set(p, q) == {0}
    assert scheffe_set(p, p) == frozenset()
    with pytest.raises(ValueError):
        scheffe_set(p, dist(0.2, 0.3, 0.5))


def test_scheffe_set_matches_pointwise_bruteforce():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = DiscreteDistribution(rng.dirichlet(np.ones(8)))
        b = DiscreteDistribution(rng.dirichlet(np.ones(8)))
        expected = frozenset(x for x in range(8) if a.pmf[x] > b.pmf[x])
        assert scheffe_set(a, b) == expected


def test_mass_examples():
    p = dist(0.9, 0.1)
    assert mass(p, set()) == 0.0
    assert mass(p, {0, 1}) == pytest.approx(1.0)
    assert mass(p, {0}) == pytest.approx(0.9)
    with pytest.raises(ValueError):
        mass(p, {5})


def test_mass_complement_consistency():
    rng = np.random.default_rng(1)
    p = DiscreteDistribution(rng.dirichlet(np.ones(16)))
    s = set(range(0, 16, 3))
    comp = set(range(16)) - s
    assert mass(p, s) + mass(p, comp) == pytest.approx(1.0, abs=1e-9)


def test_empirical_mass():
    assert empirical_mass([0, 0, 1, 0], {0}) == pytest.approx(0.75)
    assert empirical_mass([2, 2], {2}) == 1.0
    assert empirical_mass([2, 2], {1}) == 0.0
    with pytest.raises(ValueError):
        empirical_mass([], {0})


def test_l1_distance():
    assert l1_distance(dist(0.9, 0.1), dist(0.9, 0.1)) == 0.0
    assert l1_distance(dist(0.9, 0.1), dist(0.8, 0.2)) == pytest.approx(0.2)
    assert l1_distance(dist(1.0, 0.0), dist(0.0, 1.0)) == pytest.approx(2.0)


def test_scheffe_l1_identity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = DiscreteDistribution(rng.dirichlet(np.ones(12)))
        b = DiscreteDistribution(rng.dirichlet(np.ones(12)))
        s = scheffe_set(a, b)
        assert l1_distance(a, b) == pytest.approx(2 * (mass(a, s) - mass(b, s)), abs=1e-9)


def test_x_value():
    q = dist(1.0, 0.0)
    assert x_value(dist(5 / 6, 1 / 6), q) == pytest.approx(1.0)  # distance 1/3
    assert x_value(dist(0.5, 0.5), q) == pytest.approx(0.0)      # distance 1
    assert x_value(dist(17 / 18, 1 / 18), q) == pytest.approx(2.0)  # distance 1/9
    with pytest.raises(ValueError):
        x_value(q, q)


def test_required_samples_examples():
    assert required_samples(100, 0.1, 0.5) == 9981
    assert required_samples(2, 0.5, 1.0) == 160
    base = required_samples(64, 0.1, 0.4)
    assert required_samples(64, 0.1, 0.2) <= 4 * base
    assert required_samples(64, 0.1, 0.2) >= 4 * base - 4


def test_scheffe_test_rule_and_tie():
    hset = HypothesisSet([dist(0.9, 0.1), dist(0.1, 0.9)], dist(0.8, 0.2), 1000, seed=0)
    # empirical mass on {0} concentrates near 0.8: hypothesis 0 is closer
    assert hset.scheffe_test(0, 1) == 0
    # identical hypotheses tie; the rule's <= sends ties to the first argument
    twin = HypothesisSet([dist(0.5, 0.5), dist(0.5, 0.5)], dist(0.5, 0.5), 10, seed=1)
    assert twin.scheffe_test(0, 1) == 0
    assert twin.scheffe_test(1, 0) == 1
    with pytest.raises(ValueError):
        twin.scheffe_test(1, 1)


def test_scheffe_test_matches_direct_formulas():
    rng = np.random.default_rng(3)
    hyps = [DiscreteDistribution(rng.dirichlet(np.ones(10))) for _ in range(4)]
    target = DiscreteDistribution(rng.dirichlet(np.ones(10)))
    hset = HypothesisSet(hyps, target, 500, seed=4)
    for i, j in itertools.combinations(range(4), 2):
        s = scheffe_set(hyps[i], hyps[j])
        mu = empirical_mass(hset.samples.tolist(), s)
        expected = i if abs(mass(hyps[i], s) - mu) <= abs(mass(hyps[j], s) - mu) else j
        assert hset.scheffe_test(i, j) == expected


def test_cost_tally_per_test():
    hset = HypothesisSet([dist(0.9, 0.1), dist(0.1, 0.9)], dist(0.8, 0.2), 321, seed=0)
    before_cost = hset.cost_units
    before_s = hset.eo_s_count
    before_p = hset.eo_p_count
    hset.scheffe_test(0, 1)
    assert hset.cost_units - before_cost == 321 * (scheffe.EO_S + 1) + 2 * scheffe.EO_P
    assert hset.eo_s_count - before_s == 321 * scheffe.EO_S
    assert hset.eo_p_count - before_p == 2 * scheffe.EO_P
    assert hset.eo_q_count == 321 * scheffe.EO_Q


def test_comparator_determinism_and_memo():
    family = mixture_hypotheses(8, 16, seed=5, sample_count=200)
    state = ScheffeComparatorState(family, seed=0)
    outcomes = {}
    for i, j in itertools.combinations(range(8), 2):
        outcomes[(i, j)] = state.compare(i, j)
    cost_after_first_pass = family.cost_units
    for (i, j), w in outcomes.items():
        assert state.compare(i, j) == w
        assert state.compare(j, i) == w
    assert family.cost_units == cost_after_first_pass  # memo: no re-billing
    assert state.classical_query_count == 3 * len(outcomes)


def test_comparator_row_commit_and_dummies():
    family = mixture_hypotheses(6, 12, seed=6, sample_count=100)
    state = ScheffeComparatorState(family, seed=0)
    view = state.marked_view(2, n_ext=8)
    full = view.as_frozenset()
    assert {6, 7} <= full
    for j in range(6):
        expected = 1 if j in full else 0
        if j == 2:
            expected = 0
        assert state.oracle_bit(2, j) == expected
    assert state.oracle_bit(2, 7) == 1


def test_ground_truth_ranks_and_delta():
    q = dist(1.0, 0.0, 0.0)
    hyps = [q, dist(0.5, 0.5, 0.0), dist(0.4, 0.3, 0.3), dist(0.0, 0.0, 1.0)]
    hset = HypothesisSet(hyps, q, 10, seed=0)
    # distances: 0, 1.0, 1.2, 2.0 -> ranks 1..4 ascending
    assert hset.ground_truth_ranks() == [1, 2, 3, 4]
    # levels 1.0, 1.2, 2.0 all within a factor 3 of each other: fudge size 2
    assert hset.fudge_delta() == 1
    xs = hset.x_values()
    assert xs[0] is None
    assert xs[1] == pytest.approx(0.0)


def test_min_level_gap():
    q = dist(1.0, 0.0, 0.0, 0.0)
    hyps = [q, dist(0.5, 0.5, 0.0, 0.0), dist(0.95, 0.05, 0.0, 0.0)]
    hset = HypothesisSet(hyps, q, 10, seed=0)
    # distances 1.0 and 0.1: x gap = log3(10)
    assert hset.min_level_gap() == pytest.approx(math.log(10) / math.log(3))


def test_gridded_family_structure():
    family = gridded_hypotheses(31, 32, seed=0, x_gap=0.8, sample_count=100)
    assert family.n == 31
    dists = family.distances()
    assert dists[0] == 0.0
    # levels are exact up to bisection tolerance: 15 levels of 2
    levels = sorted(set(round(d, 9) for d in dists[1:]))
    assert len(levels) == 15
    assert family.min_level_gap() == pytest.approx(0.8, abs=1e-6)
    # all pmfs pairwise distinct
    keys = {tuple(np.round(h.pmf, 12)) for h in family.hypotheses}
    assert len(keys) == 31


def test_comparator_correct_on_separated_pairs():
    # far pairs (ratio above 3 with margin) must be decided correctly with
    # high probability once the sample budget matches the accuracy target
    delta_prob, x_gap = 0.2, 0.8
    family_probe = gridded_hypotheses(13, 32, seed=1, x_gap=x_gap, d_max=1.2, sample_count=10)
    epsilon = 0.8 * x_gap
    k = required_samples(13, delta_prob, epsilon)
    hyps, target = family_probe.hypotheses, family_probe.target
    dists = family_probe.distances()
    trials, all_good = 120, 0
    for seed in range(trials):
        hset = HypothesisSet(hyps, target, k, seed=1000 + seed)
        good = True
        for i, j in itertools.combinations(range(13), 2):
            d_i, d_j = dists[i], dists[j]
            lo, hi = min(d_i, d_j), max(d_i, d_j)
            if lo > 0 and hi > 3.0 * lo + epsilon / 4 or lo == 0 and hi > epsilon / 4:
                closer = i if d_i < d_j else j
                if hset.scheffe_test(i, j) != closer:
                    good = False
                    break
        all_good += good
    freq = all_good / trials
    assert freq >= (1 - delta_prob) - 3 * math.sqrt(delta_prob * (1 - delta_prob) / trials)


def test_hypothesis_select_small_families():
    # N=2 degrades to a single pairwise test through the tournament path
    q = dist(1.0, 0.0, 0.0)
    pair = HypothesisSet([dist(0.2, 0.4, 0.4), q], q, 2000, seed=2)
    assert hypothesis_select(pair, 0.2, 0) == 1
    # mid-size family: the winner should essentially always be the target copy
    family = gridded_hypotheses(31, 32, seed=3, x_gap=0.8)
    hits = 0
    for seed in range(25):
        hset = HypothesisSet(family.hypotheses, family.target,
                             family.sample_count, seed=seed)
        out = hypothesis_select(hset, 0.1, hset.fudge_delta(), seed=seed)
        hits += hset.distances()[out] <= 0.8 * 0.8
    assert hits >= 22


def test_file_roundtrip(tmp_path):
    family = mixture_hypotheses(5, 8, seed=7, sample_count=50)
    path = tmp_path / "hyp.txt"
    save_hypotheses(family, str(path))
    loaded = load_hypotheses(str(path), sample_count=50, seed=7)
    assert loaded.n == 5
    for a, b in zip(loaded.hypotheses, family.hypotheses):
        assert np.array_equal(a.pmf, b.pmf)
    assert np.array_equal(loaded.target.pmf, family.target.pmf)
    assert path.read_text().startswith("# n=5 d=8\n")
