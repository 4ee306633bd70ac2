import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustqmf.instance import Instance, generate, load_instance, save_instance


def test_rank_examples():
    inst = Instance([3.0, 1.0, 2.0])
    assert inst.rank(1) == 1
    assert inst.rank(0) == 3
    inst = Instance([0.0, 0.5, 2.0, 2.4, 5.0])
    assert inst.rank(3) == 4


def test_rank_is_permutation():
    inst = Instance([5.0, -2.0, 3.3, 0.1, 9.9])
    ranks = sorted(inst.rank(j) for j in range(inst.n))
    assert ranks == [1, 2, 3, 4, 5]
    for j in range(inst.n):
        assert inst.index_of_rank(inst.rank(j)) == j


def test_fudge_zone_examples():
    inst = Instance([0.0, 0.5, 2.0])
    assert inst.fudge_zone(0) == {1}
    assert inst.fudge_zone(2) == set()
    inst = Instance([0.0, 0.5, 2.0, 2.4, 5.0])
    assert inst.fudge_zone(2) == {3}


def test_fudge_zone_boundary_is_inclusive():
    inst = Instance([0.0, 1.0, 3.0])
    assert inst.fudge_zone(0) == {1}
    assert inst.fudge_zone(1) == {0}


def test_delta_examples():
    assert Instance([0.0, 0.5, 2.0]).delta().delta == 1
    assert Instance([0.0, 10.0, 20.0]).delta().delta == 0
    report = Instance([0.0, 0.3, 0.6, 0.9, 5.0]).delta()
    assert max(report.sizes) == 3
    assert report.delta == 2


def test_delta_report_consistency():
    inst = generate("grid", 60, 3, seed=1)
    report = inst.delta()
    assert report.delta == math.ceil(max(report.sizes) / 2)
    for j in range(inst.n):
        assert report.sizes[j] == inst.fudge_size(j) == len(inst.fudge_zone(j))
        assert report.sizes[j] <= 2 * report.delta


def test_alpha_rescaling():
    inst = Instance([0.0, 5.0, 20.0], alpha=10.0)
    assert inst.values == (0.0, 0.5, 2.0)
    assert inst.fudge_zone(0) == {1}


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        Instance([1.0])
    with pytest.raises(ValueError):
        Instance([1.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        Instance([1.0, 2.0], alpha=0.0)
    with pytest.raises(IndexError):
        Instance([1.0, 2.0]).rank(2)
    with pytest.raises(IndexError):
        Instance([1.0, 2.0]).fudge_zone(-1)


@pytest.mark.parametrize("kind,n,delta", [
    ("uniform-spread", 10, 0),
    ("uniform-spread", 500, 0),
    ("clustered", 100, 3),
    ("clustered", 64, 1),
    ("clustered", 9, 4),
    ("grid", 50, 2),
    ("grid", 200, 8),
    ("grid", 5, 0),
])
def test_generators_hit_target_delta(kind, n, delta):
    inst = generate(kind, n, delta, seed=42)
    assert inst.n == n
    assert inst.delta().delta == delta


def test_generators_reproducible():
    a = generate("clustered", 80, 2, seed=123)
    b = generate("clustered", 80, 2, seed=123)
    c = generate("clustered", 80, 2, seed=124)
    assert a.values == b.values
    assert a.values != c.values


def test_generator_infeasible_combinations():
    with pytest.raises(ValueError):
        generate("uniform-spread", 10, 1, seed=0)
    with pytest.raises(ValueError):
        generate("clustered", 5, 3, seed=0)  # cluster needs 7 values
    with pytest.raises(ValueError):
        generate("grid", 4, 3, seed=0)
    with pytest.raises(ValueError):
        generate("nonsense", 10, 0, seed=0)
    with pytest.raises(ValueError):
        generate("grid", 1, 0, seed=0)


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=40, unique=True))
@settings(max_examples=200, deadline=None)
def test_fudge_symmetry_and_rank_bijection(values):
    inst = Instance(values)
    ranks = sorted(inst.rank(j) for j in range(inst.n))
    assert ranks == list(range(1, inst.n + 1))
    for j in range(inst.n):
        for i in inst.fudge_zone(j):
            assert j in inst.fudge_zone(i)
            assert abs(inst.values[i] - inst.values[j]) <= 1.0
    report = inst.delta()
    assert all(s <= 2 * report.delta for s in report.sizes)


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=40, unique=True))
@settings(max_examples=200, deadline=None)
def test_fudge_window_matches_bruteforce(values):
    inst = Instance(values)
    for j in range(inst.n):
        brute = {i for i in range(inst.n)
                 if i != j and abs(inst.values[i] - inst.values[j]) <= 1.0}
        assert inst.fudge_zone(j) == brute


def test_fudge_split():
    inst = Instance([0.0, 0.5, 0.9, 2.0])
    below, above = inst.fudge_split(1)
    assert set(below) == {0}
    assert set(above) == {2}


def test_save_load_roundtrip(tmp_path):
    inst = generate("clustered", 30, 2, seed=9)
    path = tmp_path / "inst.txt"
    save_instance(inst, str(path))
    loaded = load_instance(str(path))
    assert loaded.values == inst.values
    assert path.read_text().startswith("# n=30 alpha=1\n")


def test_load_rejects_duplicates(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# n=2 alpha=1\n1.0\n1.0\n")
    with pytest.raises(ValueError):
        load_instance(str(path))
