"""Static SVG figures: choropleths, Moran diagnostics, region scores and posterior summaries.

Every writer fixes the SVG hash salt and drops the date metadata so the same
inputs always give the same file.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import LineCollection, PatchCollection  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.patches import Patch, PathPatch  # noqa: E402
from matplotlib.path import Path as MplPath  # noqa: E402
import numpy as np  # noqa: E402

from .esda import NOT_SIGNIFICANT  # noqa: E402

__all__ = [
    "CLUSTER_COLORS",
    "save_svg",
    "choropleth",
    "cluster_map",
    "region_map",
    "network_map",
    "reference_histogram",
    "moran_scatter",
    "local_moran_panels",
    "coherence_plot",
    "biplot",
    "radar",
    "interval_forest",
    "fitted_lines",
    "waic_bars",
    "gwr_maps",
]

CLUSTER_COLORS = {
    "HH": "#d7191c",
    "LL": "#2c7bb6",
    "LH": "#abd9e9",
    "HL": "#fdae61",
    NOT_SIGNIFICANT: "#d9d9d9",
}
RAMP = ["#fef0d9", "#fdcc8a", "#fc8d59", "#e34a33", "#b30000"]

plt.rcParams.update({"svg.hashsalt": "regionlab", "svg.fonttype": "none", "font.size": 8})


def save_svg(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return path


def _patch(geom) -> PathPatch:
    verts, codes = [], []
    for part in geom.polygons:
        for ring in part:
            ring = np.asarray(ring, dtype=float)
            verts.extend(ring.tolist() + [ring[0].tolist()])
            codes.extend([MplPath.MOVETO] + [MplPath.LINETO] * (len(ring) - 1) + [MplPath.CLOSEPOLY])
    return PathPatch(MplPath(verts, codes))


def _frame(ax, geometries):
    b = np.array([g.bounds for g in geometries])
    pad = 0.02 * max(b[:, 2].max() - b[:, 0].min(), b[:, 3].max() - b[:, 1].min())
    ax.set_xlim(b[:, 0].min() - pad, b[:, 2].max() + pad)
    ax.set_ylim(b[:, 1].min() - pad, b[:, 3].max() + pad)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])


def _draw_classes(ax, geometries, values, title):
    """Sequential choropleth with up to five Fisher-Jenks classes."""
    from .classify import fisher_jenks

    values = np.asarray(values, dtype=float)
    k = min(5, len(np.unique(values)))
    if k >= 2:
        cls = fisher_jenks(values, k)
        edges = np.concatenate([[values.min()], cls.breaks, [values.max()]])
        labels = cls.labels
    else:
        edges = np.array([values.min(), values.max()])
        labels = np.zeros(len(values), dtype=int)
    cmap = ListedColormap(RAMP[:max(k, 1)])
    coll = PatchCollection([_patch(g) for g in geometries], edgecolor="#555555", linewidth=0.3)
    coll.set_facecolor([cmap(int(c)) for c in labels])
    ax.add_collection(coll)
    handles = [
        Patch(facecolor=cmap(c), edgecolor="#555555", label=f"{edges[c]:.4g} to {edges[c + 1]:.4g}")
        for c in range(len(edges) - 1)
    ]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.0, 1.0), frameon=False, fontsize=6)
    _frame(ax, geometries)
    ax.set_title(title)


def choropleth(geometries, values, title: str, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    _draw_classes(ax, geometries, values, title)
    return save_svg(fig, path)


def _draw_clusters(ax, geometries, clusters, title):
    coll = PatchCollection([_patch(g) for g in geometries], edgecolor="#555555", linewidth=0.3)
    coll.set_facecolor([CLUSTER_COLORS[c] for c in clusters])
    ax.add_collection(coll)
    handles = [Patch(facecolor=col, label=name) for name, col in CLUSTER_COLORS.items()]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.0, 1.0), frameon=False, fontsize=6)
    _frame(ax, geometries)
    ax.set_title(title)


def cluster_map(geometries, clusters, title: str, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    _draw_clusters(ax, geometries, clusters, title)
    return save_svg(fig, path)


def region_map(geometries, labels, path, title: str = "regions"):
    """Provinces coloured by region label on a qualitative palette."""
    labels = np.asarray(labels)
    uniq = np.unique(labels)
    palette = plt.get_cmap("tab10" if len(uniq) <= 10 else "tab20")
    colour = {u: palette(i % palette.N) for i, u in enumerate(uniq)}
    fig, ax = plt.subplots(figsize=(5, 4))
    coll = PatchCollection([_patch(g) for g in geometries], edgecolor="#555555", linewidth=0.3)
    coll.set_facecolor([colour[u] for u in labels])
    ax.add_collection(coll)
    handles = [Patch(facecolor=colour[u], label=f"region {u}") for u in uniq]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.0, 1.0), frameon=False, fontsize=6)
    _frame(ax, geometries)
    ax.set_title(title)
    return save_svg(fig, path)


def network_map(geometries, w, path, title: str = "k-nearest-neighbour graph"):
    """Province outlines with a segment from each unit to each of its neighbours."""
    c = np.array([g.centroid for g in geometries])
    segs = [(c[i], c[j]) for i in range(w.n) for j in w.neighbors[i]]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.add_collection(PatchCollection([_patch(g) for g in geometries], facecolor="none", edgecolor="#999999",
                                      linewidth=0.3))
    ax.add_collection(LineCollection(segs, colors="#3182bd", linewidths=0.5))
    ax.plot(c[:, 0], c[:, 1], "o", color="#08519c", markersize=1.5)
    _frame(ax, geometries)
    ax.set_title(title)
    return save_svg(fig, path)


def reference_histogram(result, path, title: str = "Permutation reference distribution"):
    fig, ax = plt.subplots(figsize=(4.5, 3))
    ax.hist(result.reference, bins=40, color="#9ecae1", edgecolor="white")
    ax.axvline(result.I, color="#d7191c", label=f"observed I = {result.I:.3f}")
    ax.axvline(result.expected_I, color="black", linestyle="--", label=f"E[I] = {result.expected_I:.3f}")
    ax.set_xlabel("Moran's I")
    ax.set_ylabel("count")
    ax.set_title(f"{title} (p = {result.p_value:.3g})")
    ax.legend(frameon=False)
    return save_svg(fig, path)


def _draw_scatter(ax, z, lag_z, slope, intercept, title):
    ax.axhline(0, color="#999999", linewidth=0.5)
    ax.axvline(0, color="#999999", linewidth=0.5)
    ax.scatter(z, lag_z, s=8, color="#3182bd")
    xs = np.array([z.min(), z.max()])
    ax.plot(xs, intercept + slope * xs, color="#d7191c", label=f"slope = {slope:.3f}")
    ax.set_xlabel("standardized value")
    ax.set_ylabel("spatial lag")
    ax.set_title(title)
    ax.legend(frameon=False)


def moran_scatter(plot_data: dict, path, title: str = "Moran scatter"):
    fig, ax = plt.subplots(figsize=(4, 4))
    _draw_scatter(ax, plot_data["z"], plot_data["lag_z"], plot_data["slope"], plot_data["intercept"], title)
    return save_svg(fig, path)


def local_moran_panels(geometries, values, local, path, name: str = ""):
    """Value choropleth, local I choropleth, p-value choropleth and the cluster map."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    _draw_classes(axes[0, 0], geometries, values, name or "value")
    _draw_classes(axes[0, 1], geometries, local.I_i, "local Moran's I")
    _draw_classes(axes[1, 0], geometries, local.p_i, "pseudo p-value")
    _draw_clusters(axes[1, 1], geometries, local.cluster, f"clusters (alpha = {local.alpha:g})")
    fig.tight_layout()
    return save_svg(fig, path)


def coherence_plot(scores, path):
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
    r = scores.n_regions
    left.plot(r, scores.norm_ipq, "o-", label="IPQ")
    left.plot(r, scores.norm_silhouette, "s-", label="silhouette")
    left.plot(r, scores.norm_calinski_harabasz, "^-", label="Calinski-Harabasz")
    left.set_title("normalized scores")
    right.plot(r, scores.combined_silhouette, "o-", label="IPQ + silhouette")
    right.plot(r, scores.combined_calinski_harabasz, "s-", label="IPQ + Calinski-Harabasz")
    right.set_title("combined scores")
    for ax in (left, right):
        ax.set_xlabel("number of regions")
        ax.set_xticks(r)
        ax.legend(frameon=False)
    fig.tight_layout()
    return save_svg(fig, path)


def biplot(result, path, labels=None):
    """Scores on the first two components with loading arrows, plus cumulative variance."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))
    s = result.scores
    if labels is None:
        left.scatter(s[:, 0], s[:, 1], s=8, color="#3182bd")
    else:
        labels = np.asarray(labels)
        for lab in np.unique(labels):
            m = labels == lab
            left.scatter(s[m, 0], s[m, 1], s=8, label=f"region {lab}")
        left.legend(frameon=False, fontsize=6)
    reach = np.abs(s[:, :2]).max() if s.shape[1] > 1 else 1.0
    for name, row in zip(result.names, result.loadings):
        left.annotate("", xy=(row[0] * reach, row[1] * reach if len(row) > 1 else 0), xytext=(0, 0),
                      arrowprops={"arrowstyle": "->", "color": "#d7191c"})
        left.text(row[0] * reach * 1.05, (row[1] if len(row) > 1 else 0) * reach * 1.05, name, fontsize=6)
    evr = result.explained_variance_ratio
    left.set_xlabel(f"PC1 ({100 * evr[0]:.1f}%)")
    left.set_ylabel(f"PC2 ({100 * evr[1]:.1f}%)" if len(evr) > 1 else "PC2")
    idx = np.arange(1, len(evr) + 1)
    right.bar(idx, evr, color="#9ecae1")
    right.plot(idx, result.cumulative, "o-", color="#08519c")
    right.set_xlabel("component")
    right.set_ylabel("explained variance")
    right.set_xticks(idx)
    fig.tight_layout()
    return save_svg(fig, path)


def radar(profile, names, path, title: str = "regional profiles"):
    profile = np.asarray(profile, dtype=float)
    p = profile.shape[1]
    ang = np.linspace(0, 2 * np.pi, p, endpoint=False)
    ang_c = np.concatenate([ang, ang[:1]])
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="polar")
    for r, row in enumerate(profile):
        ax.plot(ang_c, np.concatenate([row, row[:1]]), label=f"region {r}")
    ax.set_xticks(ang)
    ax.set_xticklabels(names, fontsize=6)
    ax.set_ylim(0, 1)
    ax.set_title(title)
    ax.legend(loc="upper left", bbox_to_anchor=(1.05, 1.0), frameon=False, fontsize=6)
    return save_svg(fig, path)


def interval_forest(intervals: dict, path, title: str = "95% credible intervals"):
    """Horizontal interval plot; ``intervals`` maps name -> (lo, median, hi)."""
    names = list(intervals)
    lo, mid, hi = (np.array([intervals[k][i] for k in names]) for i in range(3))
    y = np.arange(len(names))[::-1]
    fig, ax = plt.subplots(figsize=(5, 0.3 * len(names) + 1))
    ax.hlines(y, lo, hi, color="#3182bd")
    ax.plot(mid, y, "o", color="#08519c", markersize=3)
    ax.set_yticks(y)
    ax.set_yticklabels(names)
    ax.set_title(title)
    return save_svg(fig, path)


def fitted_lines(data, draws, path, marker: float = 12.0, title: str = "posterior median fits"):
    """Observed points with each region's median fitted line; dashed reference at ``marker`` years."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    alpha = np.median(draws.region_param("alpha"), axis=0)
    beta = np.median(draws.region_param("beta"), axis=0)
    xbar = data.region_xbar
    for j in range(len(alpha)):
        m = data.region == j
        pts = ax.scatter(data.x[m], data.y[m], s=8, label=str(data.region_names[j]))
        xs = np.linspace(data.x[m].min(), data.x[m].max(), 2)
        ax.plot(xs, alpha[j] + beta[j] * (xs - xbar[j]), color=pts.get_facecolor()[0])
    ax.axvline(marker, color="black", linestyle="--", linewidth=0.8)
    ax.set_xlabel("years of education")
    ax.set_ylabel("monthly income")
    ax.set_title(f"{title} ({draws.variant.value})")
    ax.legend(frameon=False, fontsize=6)
    return save_svg(fig, path)


def waic_bars(values: dict, path, errors: dict | None = None):
    names = list(values)
    fig, ax = plt.subplots(figsize=(4.5, 3))
    yerr = [errors[n] for n in names] if errors else None
    ax.bar(names, [values[n] for n in names], yerr=yerr, color="#9ecae1", capsize=3)
    lo = min(values.values())
    hi = max(values.values())
    pad = 0.2 * (hi - lo) + 1.0
    ax.set_ylim(lo - pad - (max(yerr) if yerr else 0), hi + pad + (max(yerr) if yerr else 0))
    ax.set_ylabel("WAIC (lower is better)")
    return save_svg(fig, path)


def gwr_maps(geometries, result, lag_residual, path):
    """Fitted income, local slope, residual and residual spatial lag."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    _draw_classes(axes[0, 0], geometries, result.fitted, "fitted income")
    _draw_classes(axes[0, 1], geometries, result.slope, "local slope")
    _draw_classes(axes[1, 0], geometries, result.residual, "residual")
    _draw_classes(axes[1, 1], geometries, lag_residual, "residual spatial lag")
    fig.tight_layout()
    return save_svg(fig, path)
