import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regionlab import gwr, synth
from regionlab.esda import MoranResult
from regionlab.weights import knn_weights


def wls_oracle(x, y, w, self_weight=1.0):
    """Per-unit weighted least squares via lstsq on sqrt-weighted rows."""
    n, k = w.n, w.k
    out = np.empty((n, 3))
    for i in range(n):
        idx = np.r_[i, w.neighbors[i]]
        wt = np.r_[self_weight, w.weights[i]]
        X = np.column_stack([np.ones(k + 1), x[idx]])
        sw = np.sqrt(wt)
        coef, *_ = np.linalg.lstsq(X * sw[:, None], y[idx] * sw, rcond=None)
        e = y[idx] - X @ coef
        sigma2 = (wt * e**2).sum() / (k - 1)
        cov = sigma2 * np.linalg.inv(X.T @ (wt[:, None] * X))
        out[i] = coef[0], coef[1], np.sqrt(cov[1, 1])
    return out


def test_matches_lstsq_oracle(grid8, rng):
    _, w = grid8
    x = rng.uniform(8, 14, 64)
    y = 5000 + 1500 * x + rng.normal(0, 800, 64)
    r = gwr.gwr_fit(x, y, w)
    oracle = wls_oracle(x, y, w)
    assert np.allclose(r.intercept, oracle[:, 0], rtol=1e-9, atol=1e-6)
    assert np.allclose(r.slope, oracle[:, 1], rtol=1e-9, atol=1e-9)
    assert np.allclose(r.slope_se, oracle[:, 2], rtol=1e-9)
    assert np.allclose(r.residual, y - r.fitted, atol=0)
    assert np.allclose(r.fitted, r.intercept + r.slope * x)


def test_exact_linear_data(grid8, rng):
    _, w = grid8
    x = rng.uniform(8, 14, 64)
    y = 3000 + 1500 * x
    r = gwr.gwr_fit(x, y, w)
    assert np.max(np.abs(r.slope - 1500)) < 1e-9 * 1500
    assert np.max(np.abs(r.residual)) < 1e-9 * np.abs(y).max()
    diag = gwr.residual_moran(r, w)
    assert isinstance(diag, gwr.ExactFit)
    assert diag.to_dict()["status"] == "exact fit"


def test_locally_constant_education_names_province(grid8):
    _, w = grid8
    x = np.arange(64.0)
    bad = [0] + w.neighbors[0].tolist()
    x[bad] = 10.0
    with pytest.raises(ValueError, match=r"province\(s\): 0\b"):
        gwr.gwr_fit(x, np.arange(64.0), w)


def test_complete_graph_equals_global_ols(rng):
    n = 12
    w = knn_weights(rng.uniform(size=(n, 2)), n - 1)
    x = rng.normal(size=n)
    y = 2 + 3 * x + rng.normal(size=n)
    r = gwr.gwr_fit(x, y, w, self_weight=1.0 / (n - 1))
    slope, intercept = np.polyfit(x, y, 1)
    assert np.allclose(r.slope, slope, rtol=1e-12)
    assert np.allclose(r.intercept, intercept, rtol=1e-12)


@given(st.floats(-1e3, 1e3), st.integers(0, 1000))
def test_shift_of_education_is_absorbed(shift, seed):
    geoms = synth.grid_geometries(5, 5)
    w = knn_weights(synth.centroids_of(geoms), 5)
    rng = np.random.default_rng(seed)
    x = rng.uniform(8, 14, 25)
    y = 1000 * x + rng.normal(0, 500, 25)
    a, b = gwr.gwr_fit(x, y, w), gwr.gwr_fit(x + shift, y, w)
    assert np.allclose(a.slope, b.slope, rtol=1e-7, atol=1e-6)
    assert np.allclose(a.fitted, b.fitted, rtol=1e-9, atol=1e-6)
    assert np.allclose(a.residual, b.residual, atol=1e-6)


def test_slopes_within_three_se(grid8):
    _, w = grid8
    inside = []
    for seed in range(50):
        rng = np.random.default_rng(seed)
        x = rng.uniform(8, 14, 64)
        y = 4000 + 1500 * x + rng.normal(0, 1000, 64)
        r = gwr.gwr_fit(x, y, w)
        inside.append(np.abs(r.slope - 1500) <= 3 * r.slope_se)
    # a 3-SE band on a 4-dof t statistic covers roughly 96%
    assert np.mean(inside) >= 0.9


def test_iid_residuals_rarely_significant(grid8):
    _, w = grid8
    ps = []
    for seed in range(40):
        e = np.random.default_rng(seed).normal(size=64)
        r = gwr.GwrResult(tuple(w.ids), np.zeros(64), e, np.zeros(64), np.zeros(64), np.zeros(64), np.zeros(64), e)
        m = gwr.residual_moran(r, w, n_perm=499, seed=seed)
        assert isinstance(m, MoranResult)
        ps.append(m.p_value)
    assert np.mean(np.array(ps) > 0.05) >= 0.85


def test_smooth_residuals_detected():
    geoms = synth.grid_geometries(12, 12)
    w = knn_weights(synth.centroids_of(geoms), 4)
    e = synth.autocorrelated_field(w, 0.9, seed=1)
    r = gwr.GwrResult(tuple(w.ids), np.zeros(144), e, np.zeros(144), np.zeros(144), np.zeros(144), np.zeros(144), e)
    assert gwr.residual_moran(r, w, n_perm=999, seed=0).p_value <= 0.05


def test_rows_and_shape_checks(grid8, rng):
    _, w = grid8
    x = rng.uniform(8, 14, 64)
    r = gwr.gwr_fit(x, 2 * x, w)
    row = next(r.rows())
    assert set(row) == {"province_id", "education", "income", "intercept", "slope", "slope_se", "fitted", "residual"}
    with pytest.raises(ValueError, match="length"):
        gwr.gwr_fit(x[:10], x[:10], w)
    with pytest.raises(ValueError, match="finite"):
        gwr.gwr_fit(np.r_[x[:-1], np.nan], x, w)
