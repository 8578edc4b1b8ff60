"""Synthetic layouts and attribute fields with known ground truth."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Voronoi

from .bayes import RegressionData
from .geometry import RegionGeometry
from .ingest import POVERTY_FACTORS, EducationGrade, FeatureTable, HouseholdRecord, write_geojson
from .weights import SpatialWeights, knn_weights, spatial_lag

__all__ = [
    "SyntheticScenario",
    "grid_geometries",
    "voronoi_geometries",
    "centroids_of",
    "autocorrelated_field",
    "RegressionTruth",
    "hierarchical_income_data",
    "grid_blocks",
    "block_scenario",
    "thailand_like",
    "synthetic_households",
]


def grid_geometries(rows: int, cols: int) -> list[RegionGeometry]:
    """Unit squares in row-major order; cell ``r * cols + c`` spans [c, c+1] x [r, r+1]."""
    out = []
    for r in range(rows):
        for c in range(cols):
            ring = [(c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1)]
            out.append(RegionGeometry.from_polygons(str(r * cols + c), [[ring]]))
    return out


def voronoi_geometries(n: int, seed: int = 0, bbox=(0.0, 0.0, 1.0, 1.0), relax: int = 2) -> list[RegionGeometry]:
    """Voronoi cells of ``n`` random sites clipped to ``bbox``.

    Sites are mirrored across the four box edges so every original cell is
    bounded by the box. Neighbouring cells share vertex-identical edges.
    A few Lloyd iterations even out cell sizes.
    """
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = bbox
    pts = rng.uniform([x0, y0], [x1, y1], size=(n, 2))
    for it in range(relax + 1):
        mirrored = np.vstack([
            pts,
            np.column_stack([2 * x0 - pts[:, 0], pts[:, 1]]),
            np.column_stack([2 * x1 - pts[:, 0], pts[:, 1]]),
            np.column_stack([pts[:, 0], 2 * y0 - pts[:, 1]]),
            np.column_stack([pts[:, 0], 2 * y1 - pts[:, 1]]),
        ])
        vor = Voronoi(mirrored)
        verts = np.clip(vor.vertices, [x0, y0], [x1, y1])
        cells = []
        for i in range(n):
            region = vor.regions[vor.point_region[i]]
            if -1 in region or len(region) < 3:
                raise RuntimeError("unbounded Voronoi cell inside the mirrored box")
            cells.append(verts[region])
        geoms = [RegionGeometry.from_polygons(str(i), [[cell]]) for i, cell in enumerate(cells)]
        if it < relax:
            pts = np.array([g.centroid for g in geoms])
    return geoms


def centroids_of(geometries) -> np.ndarray:
    return np.array([g.centroid for g in geometries])


def autocorrelated_field(w: SpatialWeights, rho: float = 0.9, seed: int = 0) -> np.ndarray:
    """Spatial moving average ``eps + rho * lag(eps)`` with iid standard normal ``eps``."""
    if not 0 <= abs(rho) < 1:
        raise ValueError("|rho| must be below 1")
    eps = np.random.default_rng(seed).standard_normal(w.n)
    return eps + rho * spatial_lag(w, eps)


@dataclass
class RegressionTruth:
    alpha: np.ndarray
    beta: float | np.ndarray
    sigma: float | np.ndarray

    def per_region(self):
        a = np.asarray(self.alpha, dtype=float)
        J = len(a)
        b = np.broadcast_to(np.asarray(self.beta, dtype=float), (J,)).copy()
        s = np.broadcast_to(np.asarray(self.sigma, dtype=float), (J,)).copy()
        if np.any(s <= 0):
            raise ValueError("sigma must be positive")
        return a, b, s


def hierarchical_income_data(n_regions: int, provinces_per_region: int, truth: RegressionTruth, seed: int = 0,
                             x_range=(8.0, 14.0)) -> RegressionData:
    """Income ``alpha_j + beta_j (X - mean_j X) + Laplace(0, sigma_j)`` with X ~ U(8, 14)."""
    a, b, s = truth.per_region()
    if len(a) != n_regions:
        raise ValueError("truth.alpha must have one entry per region")
    rng = np.random.default_rng(seed)
    region = np.repeat(np.arange(n_regions), provinces_per_region)
    x = rng.uniform(*x_range, size=len(region))
    xbar = np.bincount(region, weights=x) / provinces_per_region
    noise = rng.laplace(0.0, 1.0, size=len(region)) * s[region]
    y = a[region] + b[region] * (x - xbar[region]) + noise
    return RegressionData(y=y, x=x, region=region)


def grid_blocks(rows: int, cols: int, block_rows: int, block_cols: int) -> np.ndarray:
    """Label cells of a rows x cols grid by a block_rows x block_cols tiling."""
    r = np.arange(rows)[:, None] * block_rows // rows
    c = np.arange(cols)[None, :] * block_cols // cols
    return (r * block_cols + c).ravel()


@dataclass
class SyntheticScenario:
    layout: str
    geometries: list[RegionGeometry]
    features: FeatureTable
    planted: np.ndarray | None = None
    truth: dict = field(default_factory=dict)

    @property
    def centroids(self) -> np.ndarray:
        return centroids_of(self.geometries)

    def weights(self, k: int = 5) -> SpatialWeights:
        return knn_weights(self.centroids, k, ids=[g.id for g in self.geometries])

    def write(self, outdir) -> dict[str, Path]:
        """Emit ``geometry.geojson``, ``attributes.csv`` and (if planted) ``planted.csv``."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = {"geometry": outdir / "geometry.geojson", "attributes": outdir / "attributes.csv"}
        write_geojson(self.geometries, paths["geometry"])
        self.features.to_csv(paths["attributes"])
        if self.planted is not None:
            paths["planted"] = outdir / "planted.csv"
            with open(paths["planted"], "w", encoding="utf-8") as fh:
                fh.write("province_id,region\n")
                for g, lab in zip(self.geometries, self.planted):
                    fh.write(f"{g.id},{int(lab)}\n")
        return paths


def block_scenario(rows: int = 12, cols: int = 12, blocks=(2, 3), n_features: int = 4, noise: float = 0.05,
                   seed: int = 0) -> SyntheticScenario:
    """Grid with planted rectangular feature blocks (6 by default)."""
    rng = np.random.default_rng(seed)
    geoms = grid_geometries(rows, cols)
    planted = grid_blocks(rows, cols, *blocks)
    n_blocks = blocks[0] * blocks[1]
    centers = rng.normal(0.0, 1.0, size=(n_blocks, n_features))
    values = centers[planted] + noise * rng.standard_normal((len(geoms), n_features))
    table = FeatureTable(tuple(g.id for g in geoms), tuple(f"f{i}" for i in range(n_features)), values)
    return SyntheticScenario("grid", geoms, table, planted, {"centers": centers})


def _planted_voronoi(geoms, w: SpatialWeights, n_regions: int, rng) -> np.ndarray:
    cents = centroids_of(geoms)
    # farthest-point seeds give well-spread region cores
    seeds = [int(rng.integers(len(cents)))]
    for _ in range(n_regions - 1):
        d = np.min(np.linalg.norm(cents[:, None] - cents[seeds][None], axis=2), axis=1)
        seeds.append(int(np.argmax(d)))
    labels = np.argmin(np.linalg.norm(cents[:, None] - cents[seeds][None], axis=2), axis=1)
    adj = w.symmetrized()
    for _ in range(10 * n_regions):
        changed = False
        for r in range(n_regions):
            idx = np.flatnonzero(labels == r)
            sub = adj[idx][:, idx]
            ncomp, comp = connected_components(sub, directed=False)
            if ncomp <= 1:
                continue
            keep = np.argmax(np.bincount(comp))
            for i in idx[comp != keep]:
                nb = adj.indices[adj.indptr[i]:adj.indptr[i + 1]]
                other = labels[nb][labels[nb] != r]
                if len(other):
                    labels[i] = np.bincount(other).argmax()
                    changed = True
        if not changed:
            break
    uniq = np.unique(labels)
    return np.searchsorted(uniq, labels)


def thailand_like(n: int = 77, n_regions: int = 6, seed: int = 0, k: int = 5, beta: float = 1500.0,
                  sigma: float = 1000.0) -> SyntheticScenario:
    """Voronoi country of ``n`` provinces with planted regional poverty profiles.

    Produces the nine standard poverty factors. Income follows a common
    education slope ``beta`` around regional means, with Laplace noise.
    """
    rng = np.random.default_rng(seed)
    geoms = voronoi_geometries(n, seed=seed)
    w = knn_weights(centroids_of(geoms), k, ids=[g.id for g in geoms])
    planted = _planted_voronoi(geoms, w, n_regions, rng)
    J = int(planted.max()) + 1

    def smooth(scale):
        return scale * autocorrelated_field(w, 0.8, int(rng.integers(2**31))) / 1.5

    edu_region = rng.uniform(10.3, 12.5, J)
    edu = edu_region[planted] + smooth(0.35)
    alpha = rng.uniform(17000.0, 22000.0, J)
    xbar = np.array([edu[planted == j].mean() for j in range(J)])
    income = alpha[planted] + beta * (edu - xbar[planted]) + rng.laplace(0.0, sigma, n)

    def factor(lo, hi, noise):
        return rng.uniform(lo, hi, J)[planted] + smooth(noise)

    cols = {
        "years_of_education": edu,
        "monthly_income": income,
        "yearly_savings": factor(20000, 60000, 3000),
        "pct_without_savings": factor(20, 60, 3),
        "income_ratio_20_20": factor(3, 8, 0.3),
        "gini_index": factor(0.25, 0.45, 0.015),
        "pct_formal_debt": factor(20, 60, 3),
        "pct_alcohol": factor(10, 40, 2),
        "pct_smoking": factor(10, 40, 2),
    }
    values = np.column_stack([cols[f.name] for f in POVERTY_FACTORS])
    values[:, 5] = np.clip(values[:, 5], 0.01, 0.99)
    values[:, [3, 6, 7, 8]] = np.clip(values[:, [3, 6, 7, 8]], 0.0, 100.0)
    table = FeatureTable(tuple(g.id for g in geoms), POVERTY_FACTORS, values)
    truth = {"alpha": alpha, "beta": beta, "sigma": sigma, "education_by_region": edu_region}
    return SyntheticScenario("voronoi", geoms, table, planted, truth)


_GRADES = list(EducationGrade)


def synthetic_households(scenario: SyntheticScenario, per_province: int = 40, seed: int = 0) -> list[HouseholdRecord]:
    """Household records loosely consistent with the scenario's province factors."""
    rng = np.random.default_rng(seed)
    f = scenario.features
    years = np.array([0, 0, 3, 6, 9, 12, 14, 16, 19], dtype=float)
    out = []
    for i, pid in enumerate(f.ids):
        edu = f.column("years_of_education")[i]
        # grade probabilities tilted toward the province's mean schooling
        p = np.exp(-0.5 * ((years - edu) / 4.0) ** 2)
        p /= p.sum()
        income = f.column("monthly_income")[i] * rng.lognormal(-0.125, 0.5, per_province)
        save_p = 1.0 - f.column("pct_without_savings")[i] / 100.0
        for h in range(per_province):
            has = bool(rng.random() < save_p)
            out.append(HouseholdRecord(
                province=pid,
                monthly_income=float(income[h]),
                education_grade=_GRADES[rng.choice(9, p=p)],
                has_savings=has,
                yearly_savings=float(rng.gamma(2.0, f.column("yearly_savings")[i] / 2.0)) if has else 0.0,
                formal_debt=bool(rng.random() < f.column("pct_formal_debt")[i] / 100.0),
                alcohol=bool(rng.random() < f.column("pct_alcohol")[i] / 100.0),
                smoking=bool(rng.random() < f.column("pct_smoking")[i] / 100.0),
            ))
    return out
