"""k-nearest-neighbour spatial weights and spatial lags."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

__all__ = ["SpatialWeights", "knn_weights", "spatial_lag"]


@dataclass(frozen=True)
class SpatialWeights:
    """Row-standardized kNN weights: row ``i`` gives ``1/k`` to each of its ``k`` neighbours.

    Attributes
    ----------
    ids : tuple of str
        Province id of each row.
    neighbors : (n, k) int array
        Neighbour indices of each row, nearest first.
    weights : (n, k) float array
        Weight attached to each entry of ``neighbors``.
    """

    ids: tuple[str, ...]
    neighbors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nb = np.asarray(self.neighbors, dtype=np.intp)
        wt = np.asarray(self.weights, dtype=float)
        if nb.ndim != 2 or wt.shape != nb.shape:
            raise ValueError("neighbors and weights must be (n, k) arrays of equal shape")
        n = nb.shape[0]
        if len(self.ids) != n:
            raise ValueError("one id per row is required")
        if np.any(nb < 0) or np.any(nb >= n) or np.any(nb == np.arange(n)[:, None]):
            raise ValueError("neighbour indices out of range or self-referencing")
        if any(len(set(row)) != len(row) for row in nb.tolist()):
            raise ValueError("repeated neighbour within a row")
        nb.setflags(write=False)
        wt.setflags(write=False)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "neighbors", nb)
        object.__setattr__(self, "weights", wt)

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]

    @property
    def k(self) -> int:
        return self.neighbors.shape[1]

    def sparse(self) -> sparse.csr_matrix:
        rows = np.repeat(np.arange(self.n), self.k)
        return sparse.csr_matrix((self.weights.ravel(), (rows, self.neighbors.ravel())), shape=(self.n, self.n))

    def dense(self) -> np.ndarray:
        return self.sparse().toarray()

    def symmetrized(self) -> sparse.csr_matrix:
        """Undirected adjacency: i ~ j when either lists the other."""
        a = self.sparse()
        a.data[:] = 1.0
        sym = ((a + a.T) > 0).astype(np.int8)
        return sparse.csr_matrix(sym)

    def adjacency_lists(self) -> list[list[int]]:
        sym = self.symmetrized()
        return [sorted(sym.indices[sym.indptr[i]:sym.indptr[i + 1]].tolist()) for i in range(self.n)]

    def n_components(self) -> int:
        return connected_components(self.symmetrized(), directed=False)[0]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "ids": list(self.ids),
            "neighbors": self.neighbors.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SpatialWeights":
        w = cls(tuple(doc["ids"]), np.array(doc["neighbors"]), np.array(doc["weights"]))
        if w.k != doc["k"]:
            raise ValueError("k does not match the neighbour lists")
        return w

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "SpatialWeights":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def knn_weights(centroids, k: int = 5, ids=None, period=None) -> SpatialWeights:
    """Build kNN weights from point coordinates.

    Parameters
    ----------
    centroids : (n, 2) array_like
    k : int
        Number of neighbours, ``1 <= k <= n - 1``.
    ids : sequence of str, optional
        Row labels; defaults to ``"0" .. "n-1"``.
    period : (px, py), optional
        Wrap distances on a torus of this size. Only useful for synthetic
        lattices without edge effects.

    Ties at equal distance go to the smaller index.
    """
    pts = np.asarray(centroids, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("centroids must be an (n, 2) array")
    n = len(pts)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} out of range for n={n}")
    if len(np.unique(pts, axis=0)) != n:
        raise ValueError("duplicate centroids")
    diff = np.abs(pts[:, None, :] - pts[None, :, :])
    if period is not None:
        per = np.asarray(period, dtype=float)
        diff = np.minimum(diff, per - diff)
    d = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(d, np.inf)
    # stable argsort on distance keeps index order among ties
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    if ids is None:
        ids = [str(i) for i in range(n)]
    return SpatialWeights(tuple(ids), order, np.full((n, k), 1.0 / k))


def spatial_lag(w: SpatialWeights, y) -> np.ndarray:
    """Weighted neighbour average ``sum_j w_ij y_j`` for every row."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] != w.n:
        raise ValueError(f"vector of length {y.shape[0]} does not match {w.n} units")
    return np.einsum("ik,ik...->i...", w.weights, y[w.neighbors])
