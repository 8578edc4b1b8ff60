import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regionlab.classify import fisher_jenks, ssw


def brute_force_ssw(y, k):
    """Minimum SSW over every split of the sorted sequence into k contiguous classes."""
    s = np.sort(np.asarray(y, dtype=float))
    n = len(s)
    best = np.inf
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0, *cuts, n)
        total = sum(((s[a:b] - s[a:b].mean()) ** 2).sum() for a, b in zip(bounds[:-1], bounds[1:]))
        best = min(best, total)
    return best


def test_two_obvious_groups():
    y = [1, 2, 3, 10, 11, 12]
    c = fisher_jenks(y, 2)
    assert c.labels.tolist() == [0, 0, 0, 1, 1, 1]
    assert c.breaks.tolist() == [3.0]
    assert c.ssw == brute_force_ssw(y, 2) == 4.0


def test_single_class():
    c = fisher_jenks([4.0, 1.0, 7.0, 2.0], 1)
    assert c.gvf == 0.0
    assert c.breaks.size == 0
    assert set(c.labels) == {0}


def test_one_class_per_distinct_value():
    y = [5, 1, 3, 3, 1, 9]
    c = fisher_jenks(y, 4)
    assert c.gvf == 1.0
    assert c.breaks.tolist() == [1.0, 3.0, 5.0]
    assert c.labels.tolist() == [2, 0, 1, 1, 0, 3]


def test_too_few_distinct_values():
    with pytest.raises(ValueError, match="distinct"):
        fisher_jenks([1, 1, 2, 2], 3)


def test_invalid_k():
    with pytest.raises(ValueError):
        fisher_jenks([1, 2, 3], 0)


def test_lexicographically_smallest_breaks_on_ties():
    # {0,1,2}: splitting after 0 or after 1 both give SSW 0.5
    c = fisher_jenks([0.0, 1.0, 2.0], 2)
    assert c.breaks.tolist() == [0.0]


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(2024)
    for trial in range(100):
        n = int(rng.integers(4, 13))
        k = int(rng.integers(1, 5))
        y = rng.integers(0, 30, n).astype(float) if trial % 3 == 0 else rng.normal(size=n)
        if len(np.unique(y)) < k:
            continue
        c = fisher_jenks(y, k)
        assert abs(c.ssw - brute_force_ssw(y, k)) <= 1e-12 * max(1.0, c.sst)


def test_classes_are_contiguous_and_nonempty():
    rng = np.random.default_rng(3)
    y = rng.lognormal(size=77)
    c = fisher_jenks(y, 5)
    order = np.argsort(y, kind="stable")
    assert np.all(np.diff(c.labels[order]) >= 0)
    assert sorted(set(c.labels.tolist())) == list(range(5))
    assert c.gvf == pytest.approx(1 - c.ssw / c.sst)


small = st.lists(st.integers(-50, 50), min_size=2, max_size=12)


@given(small, st.integers(1, 4))
def test_ssw_monotone_in_k(values, k):
    y = np.array(values, dtype=float)
    if len(np.unique(y)) < k + 1:
        return
    assert fisher_jenks(y, k + 1).ssw <= fisher_jenks(y, k).ssw + 1e-12


@given(small, st.integers(1, 4), st.sampled_from([0.25, 0.5, 2.0, 8.0]), st.integers(-100, 100))
def test_labels_invariant_under_positive_affine(values, k, a, b):
    y = np.array(values, dtype=float)
    if len(np.unique(y)) < k:
        return
    assert fisher_jenks(y, k).labels.tolist() == fisher_jenks(a * y + b, k).labels.tolist()


@given(small, st.integers(1, 4))
def test_equal_values_share_a_class(values, k):
    y = np.array(values, dtype=float)
    if len(np.unique(y)) < k:
        return
    c = fisher_jenks(y, k)
    for v in np.unique(y):
        assert len(set(c.labels[y == v].tolist())) == 1
    assert c.ssw == pytest.approx(ssw(y, c.labels))
