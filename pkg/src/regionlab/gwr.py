"""Geographically weighted regression over the kNN weights."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .esda import MoranResult, global_moran
from .weights import SpatialWeights

__all__ = ["GwrResult", "ExactFit", "gwr_fit", "residual_moran"]


@dataclass
class GwrResult:
    """One local weighted least-squares fit per unit."""

    ids: tuple
    x: np.ndarray
    y: np.ndarray
    intercept: np.ndarray
    slope: np.ndarray
    slope_se: np.ndarray
    fitted: np.ndarray
    residual: np.ndarray

    def rows(self):
        for i, pid in enumerate(self.ids):
            yield {
                "province_id": pid,
                "education": self.x[i],
                "income": self.y[i],
                "intercept": self.intercept[i],
                "slope": self.slope[i],
                "slope_se": self.slope_se[i],
                "fitted": self.fitted[i],
                "residual": self.residual[i],
            }


@dataclass
class ExactFit:
    """Diagnostic returned instead of a Moran test when residuals are constant."""

    status: str = "exact fit"
    max_abs_residual: float = 0.0

    def to_dict(self) -> dict:
        return {"status": self.status, "max_abs_residual": self.max_abs_residual}


def gwr_fit(x, y, w: SpatialWeights, self_weight: float = 1.0) -> GwrResult:
    """Regress ``y`` on ``(1, x)`` separately around every unit.

    Unit ``i`` uses its own observation with weight ``self_weight`` and its
    ``k`` neighbours with their row-standardized weights. The slope standard
    error is the classical WLS one, with residual variance
    ``sum(w e**2) / (k + 1 - 2)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = w.n, w.k
    if x.shape != (n,) or y.shape != (n,):
        raise ValueError(f"x and y must both have length {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("x and y must be finite")
    idx = np.column_stack([np.arange(n), w.neighbors])
    wt = np.column_stack([np.full(n, float(self_weight)), w.weights])
    xs, ys = x[idx], y[idx]
    sw = wt.sum(axis=1)
    xbar = (wt * xs).sum(axis=1) / sw
    ybar = (wt * ys).sum(axis=1) / sw
    dx = xs - xbar[:, None]
    sxx = (wt * dx * dx).sum(axis=1)
    scale = (wt * xs * xs).sum(axis=1)
    singular = ~(sxx > 1e-12 * np.maximum(scale, 1e-300))
    if np.any(singular):
        bad = [str(w.ids[i]) for i in np.flatnonzero(singular)]
        raise ValueError(f"education is locally constant around province(s): {', '.join(bad)}")
    slope = (wt * dx * (ys - ybar[:, None])).sum(axis=1) / sxx
    intercept = ybar - slope * xbar
    local_res = ys - (intercept[:, None] + slope[:, None] * xs)
    dof = k + 1 - 2
    if dof > 0:
        sigma2 = (wt * local_res**2).sum(axis=1) / dof
        slope_se = np.sqrt(sigma2 / sxx)
    else:
        slope_se = np.full(n, np.nan)
    fitted = intercept + slope * x
    return GwrResult(
        ids=tuple(w.ids), x=x, y=y, intercept=intercept, slope=slope, slope_se=slope_se,
        fitted=fitted, residual=y - fitted,
    )


def residual_moran(result: GwrResult, w: SpatialWeights, n_perm: int = 999, seed: int = 0) -> MoranResult | ExactFit:
    """Permutation Moran test of the GWR residuals, or :class:`ExactFit` for a perfect fit."""
    r = result.residual
    scale = max(1.0, float(np.max(np.abs(result.y))))
    if np.ptp(r) <= 1e-9 * scale:
        return ExactFit(max_abs_residual=float(np.max(np.abs(r))))
    return global_moran(r, w, n_perm=n_perm, seed=seed)
