"""Fisher-Jenks natural breaks by exact dynamic programming."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Classification", "fisher_jenks", "ssw"]


@dataclass
class Classification:
    k: int
    breaks: np.ndarray
    labels: np.ndarray
    gvf: float
    ssw: float
    sst: float

    def to_dict(self) -> dict:
        return {"k": self.k, "breaks": self.breaks.tolist(), "gvf": self.gvf, "ssw": self.ssw, "sst": self.sst}


def ssw(y, labels) -> float:
    """Total within-class sum of squared deviations."""
    y = np.asarray(y, dtype=float)
    labels = np.asarray(labels)
    return float(sum(((y[labels == c] - y[labels == c].mean()) ** 2).sum() for c in np.unique(labels)))


def _cost_table(vals, counts):
    # weighted SSQ of the run vals[a:b] for every a < b, via prefix sums
    cw = np.concatenate([[0.0], np.cumsum(counts)])
    cs = np.concatenate([[0.0], np.cumsum(counts * vals)])
    cq = np.concatenate([[0.0], np.cumsum(counts * vals * vals)])
    m = len(vals)
    a = np.arange(m + 1)[:, None]
    b = np.arange(m + 1)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        w = cw[b] - cw[a]
        s = cs[b] - cs[a]
        cost = (cq[b] - cq[a]) - s * s / w
    cost = np.where(b > a, np.maximum(cost, 0.0), np.inf)
    return cost


def fisher_jenks(y, k: int = 5) -> Classification:
    """Optimal partition of ``y`` into ``k`` classes of contiguous sorted values.

    Minimizes the within-class sum of squares exactly. Equal values always
    share a class. Among optimal partitions the one whose break positions are
    lexicographically smallest is returned.

    ``breaks[c]`` is the largest value of class ``c`` (for ``c < k - 1``), so
    ``labels = searchsorted(breaks, y)``.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) == 0:
        raise ValueError("y must be a non-empty vector")
    if k < 1:
        raise ValueError("k must be at least 1")
    vals, counts = np.unique(y, return_counts=True)
    counts = counts.astype(float)
    m = len(vals)
    if m < k:
        raise ValueError(f"need at least {k} distinct values, got {m}")
    cost = _cost_table(vals, counts)

    # suffix[c, i]: best cost of splitting vals[i:] into c classes
    suffix = np.full((k + 1, m + 1), np.inf)
    suffix[0, m] = 0.0
    for c in range(1, k + 1):
        for i in range(m - c, -1, -1):
            j = np.arange(i + 1, m - c + 2)
            suffix[c, i] = np.min(cost[i, j] + suffix[c - 1, j])

    # greedy forward pass picks the earliest break that keeps optimality
    tol = 1e-12 * max(1.0, suffix[k, 0])
    cuts, i = [], 0
    for c in range(k, 1, -1):
        j = np.arange(i + 1, m - c + 2)
        total = cost[i, j] + suffix[c - 1, j]
        best = suffix[c, i]
        j_pick = int(j[np.flatnonzero(total <= best + tol)[0]])
        cuts.append(j_pick)
        i = j_pick

    breaks = vals[np.array(cuts, dtype=int) - 1] if cuts else np.array([], dtype=float)
    labels = np.searchsorted(breaks, y, side="left")
    sst = float(((y - y.mean()) ** 2).sum())
    within = ssw(y, labels)
    # a constant vector only admits k == 1, where SSW == SST
    gvf = 1.0 - within / sst if sst > 0 else 0.0
    return Classification(k=k, breaks=breaks, labels=labels, gvf=float(gvf), ssw=within, sst=sst)
