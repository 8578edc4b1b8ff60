"""Spatially constrained Ward clustering and region-count selection scores."""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist, squareform

from ._parallel import pmap
from .geometry import RegionGeometry, dissolve, ipq, snap_tolerance

__all__ = [
    "RegionAssignment",
    "WardTree",
    "CoherenceScores",
    "ward_tree",
    "constrained_ward",
    "silhouette",
    "calinski_harabasz",
    "sweep_regions",
    "is_connected",
    "CH_CAP",
]

# stand-in for an infinite Calinski-Harabasz score (zero within-cluster scatter)
CH_CAP = 1e12


def _adjacency(graph, n: int) -> list[set[int]]:
    if hasattr(graph, "symmetrized"):
        graph = graph.symmetrized()
    if sparse.issparse(graph):
        g = sparse.csr_matrix(graph)
        g = ((g + g.T) != 0).tocsr()
        adj = [set(g.indices[g.indptr[i]:g.indptr[i + 1]].tolist()) for i in range(g.shape[0])]
    else:
        adj = [set(int(j) for j in nb) for nb in graph]
        for i, nb in enumerate(adj):
            for j in nb:
                adj[j].add(i)
    if len(adj) != n:
        raise ValueError(f"graph has {len(adj)} nodes, features have {n} rows")
    for i, nb in enumerate(adj):
        nb.discard(i)
    return adj


def _matrix(features) -> np.ndarray:
    x = features.values if hasattr(features, "values") and not isinstance(features, np.ndarray) else features
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


@dataclass
class WardTree:
    """Full constrained merge sequence.

    ``merges[t] = (a, b, cost)`` joins the clusters whose smallest member
    indices are ``a < b``. Cutting after ``n - r`` merges gives ``r`` regions.
    """

    n: int
    merges: list[tuple[int, int, float]]
    n_components: int

    def labels(self, n_regions: int) -> np.ndarray:
        if not 1 <= n_regions <= self.n:
            raise ValueError(f"n_regions must lie in [1, {self.n}]")
        if n_regions < self.n_components:
            raise ValueError(
                f"graph has {self.n_components} components; cannot form {n_regions} connected regions"
            )
        parent = list(range(self.n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b, _ in self.merges[: self.n - n_regions]:
            ra, rb = find(a), find(b)
            parent[max(ra, rb)] = min(ra, rb)
        roots = [find(i) for i in range(self.n)]
        # regions numbered by their smallest member
        order = {r: c for c, r in enumerate(sorted(set(roots)))}
        return np.array([order[r] for r in roots])


def ward_tree(features, graph) -> WardTree:
    """Agglomerate under a contiguity constraint until no adjacent clusters remain.

    Merge cost is the Ward increase in within-cluster SSE,
    ``|a||b| / (|a| + |b|) * ||mean_a - mean_b||**2``; ties go to the pair with
    the smallest ``(min index of a, min index of b)``.
    """
    x = _matrix(features)
    n = len(x)
    adj = _adjacency(graph, n)
    size = {i: 1 for i in range(n)}
    mean = {i: x[i].copy() for i in range(n)}
    nbrs = {i: set(adj[i]) for i in range(n)}

    def cost(a, b):
        d = mean[a] - mean[b]
        return size[a] * size[b] / (size[a] + size[b]) * float(np.dot(d, d))

    costs = {(a, b): cost(a, b) for a in range(n) for b in adj[a] if a < b}
    merges = []
    while costs:
        (a, b), c = min(costs.items(), key=lambda kv: (kv[1], kv[0]))
        # a < b, so the merged cluster keeps the key a
        mean[a] = (size[a] * mean[a] + size[b] * mean[b]) / (size[a] + size[b])
        size[a] += size[b]
        joined = (nbrs[a] | nbrs[b]) - {a, b}
        for other in nbrs[b]:
            nbrs[other].discard(b)
            costs.pop((min(other, b), max(other, b)), None)
        for other in nbrs[a]:
            costs.pop((min(other, a), max(other, a)), None)
        del size[b], mean[b], nbrs[b]
        nbrs[a] = joined
        for other in joined:
            nbrs[other].add(a)
            costs[(min(a, other), max(a, other))] = cost(min(a, other), max(a, other))
        merges.append((a, b, c))
    return WardTree(n=n, merges=merges, n_components=len(size))


@dataclass
class RegionAssignment:
    n_regions: int
    labels: np.ndarray
    members: list[list[int]]
    geometries: list[RegionGeometry] | None = None

    @classmethod
    def from_labels(cls, labels, geometries: Sequence[RegionGeometry] | None = None, tol=None) -> "RegionAssignment":
        labels = np.asarray(labels)
        uniq = sorted(set(labels.tolist()))
        members = [np.flatnonzero(labels == u).tolist() for u in uniq]
        regions = None
        if geometries is not None:
            regions = [dissolve([geometries[i] for i in m], tol=tol, id=str(r)) for r, m in enumerate(members)]
        relabel = np.empty(len(labels), dtype=int)
        for r, m in enumerate(members):
            relabel[m] = r
        return cls(n_regions=len(members), labels=relabel, members=members, geometries=regions)

    def mean_ipq(self) -> float:
        if self.geometries is None:
            raise ValueError("no region geometries attached")
        return float(np.mean([ipq(g) for g in self.geometries]))


def constrained_ward(features, graph, n_regions: int, geometries=None) -> RegionAssignment:
    """Cut the constrained Ward hierarchy at ``n_regions`` clusters.

    ``graph`` is a :class:`SpatialWeights` (its symmetrized kNN graph is used),
    a sparse adjacency matrix, or adjacency lists.
    """
    tree = ward_tree(features, graph)
    return RegionAssignment.from_labels(tree.labels(n_regions), geometries)


def is_connected(members: Sequence[int], graph) -> bool:
    """Breadth-first check that ``members`` induce a connected subgraph."""
    members = list(members)
    if not members:
        return False
    n = graph.n if hasattr(graph, "n") else (graph.shape[0] if sparse.issparse(graph) else len(graph))
    adj = _adjacency(graph, n)
    inside = set(members)
    seen = {members[0]}
    queue = deque([members[0]])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in inside and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen == inside


def _pairwise(x: np.ndarray) -> np.ndarray:
    return squareform(pdist(x))


def silhouette(features, labels) -> float:
    """Mean silhouette width with Euclidean distances.

    Singletons score 0, and so does a point with ``a == b == 0``.
    """
    x = _matrix(features)
    labels = np.asarray(labels)
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    if len(x) < 3:
        raise ValueError("silhouette needs at least 3 observations")
    d = _pairwise(x)
    onehot = (labels[:, None] == uniq[None, :]).astype(float)
    sizes = onehot.sum(axis=0)
    sums = d @ onehot  # (n, c) total distance to each cluster
    own = np.searchsorted(uniq, labels)
    own_size = sizes[own]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = sums[np.arange(len(x)), own] / (own_size - 1)
        mean_other = sums / sizes
    mean_other[np.arange(len(x)), own] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own_size > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(s.mean())


def calinski_harabasz(features, labels) -> float:
    """Between/within dispersion ratio ``[tr(B)/(c-1)] / [tr(W)/(n-c)]``.

    Returns :data:`CH_CAP` (with a warning) when the within scatter is zero.
    """
    x = _matrix(features)
    labels = np.asarray(labels)
    n = len(x)
    uniq = np.unique(labels)
    c = len(uniq)
    if not 2 <= c <= n - 1:
        raise ValueError(f"Calinski-Harabasz needs 2 <= clusters <= n - 1 (got {c} clusters, n={n})")
    grand = x.mean(axis=0)
    between = within = 0.0
    for u in uniq:
        xi = x[labels == u]
        mu = xi.mean(axis=0)
        between += len(xi) * float(np.sum((mu - grand) ** 2))
        within += float(np.sum((xi - mu) ** 2))
    if within <= 0.0:
        warnings.warn("zero within-cluster scatter; Calinski-Harabasz capped", RuntimeWarning, stacklevel=2)
        return CH_CAP
    return min(CH_CAP, (between / (c - 1)) / (within / (n - c)))


def _minmax(v: np.ndarray) -> np.ndarray:
    lo, hi = np.min(v), np.max(v)
    if hi == lo:
        return np.full(len(v), 0.5)
    return (v - lo) / (hi - lo)


@dataclass
class CoherenceScores:
    n_regions: np.ndarray
    mean_ipq: np.ndarray
    silhouette: np.ndarray
    calinski_harabasz: np.ndarray
    assignments: dict = field(default_factory=dict, repr=False)

    @property
    def norm_ipq(self) -> np.ndarray:
        return _minmax(self.mean_ipq)

    @property
    def norm_silhouette(self) -> np.ndarray:
        return _minmax(self.silhouette)

    @property
    def norm_calinski_harabasz(self) -> np.ndarray:
        return _minmax(self.calinski_harabasz)

    @property
    def combined_silhouette(self) -> np.ndarray:
        return self.norm_ipq + self.norm_silhouette

    @property
    def combined_calinski_harabasz(self) -> np.ndarray:
        return self.norm_ipq + self.norm_calinski_harabasz

    def best(self, score: str = "silhouette") -> int:
        v = self.combined_silhouette if score == "silhouette" else self.combined_calinski_harabasz
        # first maximum, i.e. the fewest regions among ties
        return int(self.n_regions[int(np.argmax(v))])

    def ipq_trend(self) -> float:
        """Fraction of sweep steps where mean IPQ increases (reported, never enforced)."""
        return float(np.mean(np.diff(self.mean_ipq) > 0)) if len(self.mean_ipq) > 1 else 0.0

    def to_dict(self) -> dict:
        return {
            "n_regions": self.n_regions.tolist(),
            "mean_ipq": self.mean_ipq.tolist(),
            "silhouette": self.silhouette.tolist(),
            "calinski_harabasz": self.calinski_harabasz.tolist(),
            "normalized": {
                "mean_ipq": self.norm_ipq.tolist(),
                "silhouette": self.norm_silhouette.tolist(),
                "calinski_harabasz": self.norm_calinski_harabasz.tolist(),
            },
            "combined": {
                "ipq_plus_silhouette": self.combined_silhouette.tolist(),
                "ipq_plus_calinski_harabasz": self.combined_calinski_harabasz.tolist(),
            },
            "best": {"silhouette": self.best("silhouette"), "calinski_harabasz": self.best("calinski_harabasz")},
        }


def sweep_regions(features, graph, geometries: Sequence[RegionGeometry], region_range=range(2, 10)) -> CoherenceScores:
    """Score every candidate region count on geometric and feature coherence.

    The hierarchy is built once, so each count refines the next by a single
    merge. ``features`` should already be standardized.
    """
    x = _matrix(features)
    tree = ward_tree(x, graph)
    counts = list(region_range)
    tol = snap_tolerance(geometries)

    def score(r):
        a = RegionAssignment.from_labels(tree.labels(r), geometries, tol=tol)
        return a, a.mean_ipq(), silhouette(x, a.labels), calinski_harabasz(x, a.labels)

    results = pmap(score, counts)
    return CoherenceScores(
        n_regions=np.array(counts),
        mean_ipq=np.array([r[1] for r in results]),
        silhouette=np.array([r[2] for r in results]),
        calinski_harabasz=np.array([r[3] for r in results]),
        assignments={c: r[0] for c, r in zip(counts, results)},
    )
