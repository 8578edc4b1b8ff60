import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from regionlab import pca as pc
from regionlab import synth
from regionlab.ingest import FeatureTable


def test_standardize_hand_values():
    assert np.allclose(pc.standardize(np.array([1.0, 2.0, 3.0])).ravel(), [-1, 0, 1], atol=1e-15)


def test_standardize_idempotent(rng):
    z = pc.standardize(rng.normal(5, 3, size=(30, 4)))
    assert np.max(np.abs(pc.standardize(z) - z)) < 1e-12
    assert np.allclose(z.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(z.std(axis=0, ddof=1), 1, atol=1e-12)


def test_standardize_names_constant_column():
    t = FeatureTable(("a", "b", "c"), ("income", "flat"), np.array([[1.0, 2], [2, 2], [3, 2]]))
    with pytest.raises(ValueError, match="flat"):
        pc.standardize(t)


def test_perfect_correlation():
    x = np.arange(10.0)
    r = pc.pca(pc.standardize(np.column_stack([x, 3 * x + 1])))
    assert r.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(r.loadings[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)


def test_matches_svd_oracle(rng):
    z = pc.standardize(rng.normal(size=(50, 6)) @ rng.normal(size=(6, 6)))
    r = pc.pca(z)
    _, s, vt = np.linalg.svd(z - z.mean(0), full_matrices=False)
    assert np.allclose(r.eigenvalues, s**2 / 49, rtol=1e-10)
    # same directions up to sign
    assert np.allclose(np.abs(r.loadings.T @ vt.T), np.eye(6), atol=1e-8)


def test_nine_factor_reconstruction():
    z = pc.standardize(synth.thailand_like(seed=1).features)
    r = pc.pca(z)
    assert r.loadings.shape == (9, 9)
    assert np.max(np.abs(r.reconstruct() - z)) < 1e-8
    assert r.cumulative[-1] == pytest.approx(1.0, abs=1e-12)


def test_rank_deficient_is_not_an_error(rng):
    a = rng.normal(size=(20, 2))
    r = pc.pca(pc.standardize(np.column_stack([a, a.sum(axis=1)])))
    assert r.eigenvalues[-1] == 0.0
    assert np.sum(r.eigenvalues > 0) == 2


@settings(max_examples=40)
@given(arrays(np.float64, st.tuples(st.integers(6, 25), st.integers(2, 6)),
              elements=st.floats(-100, 100, allow_nan=False)))
def test_pca_invariants(x):
    sd = x.std(axis=0, ddof=1)
    if np.any(sd < 1e-3 * max(1.0, np.abs(x).max())):
        return
    r = pc.pca(pc.standardize(x))
    p = x.shape[1]
    assert abs(r.explained_variance_ratio.sum() - 1) <= 1e-12
    assert np.max(np.abs(r.loadings.T @ r.loadings - np.eye(p))) < 1e-10
    assert np.all(np.diff(r.explained_variance_ratio) <= 1e-15)
    assert np.all(r.eigenvalues >= -1e-10)
    assert np.max(np.abs(r.scores.mean(axis=0))) < 1e-10
    # largest-magnitude entry of every loading column is positive
    cols = np.arange(p)
    assert np.all(r.loadings[np.argmax(np.abs(r.loadings), axis=0), cols] > 0)


def test_region_profile_single_region():
    assert np.all(pc.region_profile(np.random.default_rng(0).normal(size=(5, 3)), [0] * 5) == 0.5)


def test_region_profile_two_blocks():
    income = np.r_[np.full(5, 10.0), np.full(5, 30.0)]
    other = np.r_[np.full(5, 2.0), np.full(5, 1.0)]
    prof = pc.region_profile(np.column_stack([income, other]), np.repeat([0, 1], 5))
    assert prof.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_region_profile_zero_range():
    x = np.column_stack([np.ones(6), np.arange(6.0)])
    prof = pc.region_profile(x, [0, 0, 1, 1, 2, 2])
    assert np.all(prof[:, 0] == 0.5)
    assert prof[:, 1].tolist() == [0.0, 0.5, 1.0]
