"""Standardization, principal components and per-region profiles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PcaResult", "standardize", "pca", "region_profile", "region_means"]


def _names_and_matrix(features):
    if hasattr(features, "names") and hasattr(features, "values"):
        return list(features.names), np.asarray(features.values, dtype=float)
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return [f"x{c}" for c in range(x.shape[1])], x


def standardize(features) -> np.ndarray:
    """Column z-scores using the sample standard deviation (ddof=1)."""
    names, x = _names_and_matrix(features)
    if len(x) < 2:
        raise ValueError("standardize needs at least 2 rows")
    sd = x.std(axis=0, ddof=1)
    bad = [names[c] for c in np.flatnonzero(~(sd > 0))]
    if bad:
        raise ValueError(f"zero-variance column(s): {', '.join(bad)}")
    return (x - x.mean(axis=0)) / sd


@dataclass
class PcaResult:
    loadings: np.ndarray
    scores: np.ndarray
    eigenvalues: np.ndarray
    explained_variance_ratio: np.ndarray
    names: list[str]

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.explained_variance_ratio)

    def reconstruct(self) -> np.ndarray:
        return self.scores @ self.loadings.T

    def to_dict(self) -> dict:
        return {
            "names": self.names,
            "eigenvalues": self.eigenvalues.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "cumulative": self.cumulative.tolist(),
            "loadings": {n: row.tolist() for n, row in zip(self.names, self.loadings)},
            "scores": self.scores.tolist(),
        }


def pca(matrix, names=None) -> PcaResult:
    """Principal components of an already standardized matrix.

    Solves the symmetric eigenproblem of the p x p covariance (the
    correlation matrix for standardized input). Components are sorted by
    decreasing eigenvalue and each loading column is signed so its
    largest-magnitude entry is positive.
    """
    default_names, x = _names_and_matrix(matrix)
    names = list(names) if names is not None else default_names
    n, p = x.shape
    if n < 2:
        raise ValueError("pca needs at least 2 rows")
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / (n - 1)
    evals, evecs = np.linalg.eigh((cov + cov.T) / 2)
    order = np.argsort(evals, kind="stable")[::-1]
    evals, evecs = evals[order], evecs[:, order]
    pivot = np.argmax(np.abs(evecs), axis=0)
    signs = np.sign(evecs[pivot, np.arange(p)])
    signs[signs == 0] = 1.0
    evecs = evecs * signs
    evals = np.where(np.abs(evals) < 1e-12 * max(1.0, evals.max()), 0.0, evals)
    return PcaResult(
        loadings=evecs,
        scores=xc @ evecs,
        eigenvalues=evals,
        explained_variance_ratio=evals / evals.sum(),
        names=names,
    )


def region_means(features, labels) -> np.ndarray:
    _, x = _names_and_matrix(features)
    labels = np.asarray(labels)
    regions = np.unique(labels)
    if len(labels) != len(x):
        raise ValueError("one label per row is required")
    return np.vstack([x[labels == r].mean(axis=0) for r in regions])


def region_profile(features, labels) -> np.ndarray:
    """Per-region factor means, min-max scaled across regions per factor.

    A factor with the same mean in every region maps to 0.5. Rows follow the
    sorted region labels.
    """
    n_regions = getattr(labels, "n_regions", None)
    labels = np.asarray(labels.labels if hasattr(labels, "labels") else labels)
    means = region_means(features, labels)
    if n_regions is not None and len(means) != n_regions:
        raise ValueError("empty region in assignment")
    lo, hi = means.min(axis=0), means.max(axis=0)
    span = hi - lo
    out = np.full_like(means, 0.5)
    ok = span > 0
    out[:, ok] = (means[:, ok] - lo[ok]) / span[ok]
    return out
