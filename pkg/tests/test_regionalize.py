import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regionlab import regionalize as rz
from regionlab import synth
from regionlab.weights import knn_weights


def path_graph(n):
    return [[j for j in (i - 1, i + 1) if 0 <= j < n] for i in range(n)]


def naive_ward(x, adj, n_regions):
    """Recompute every admissible merge from scratch at each step."""
    clusters = [[i] for i in range(len(x))]
    while len(clusters) > n_regions:
        best = None
        for a, b in itertools.combinations(range(len(clusters)), 2):
            ca, cb = clusters[a], clusters[b]
            if not any(j in adj[i] for i in ca for j in cb):
                continue
            d = x[ca].mean(axis=0) - x[cb].mean(axis=0)
            cost = len(ca) * len(cb) / (len(ca) + len(cb)) * float(d @ d)
            key = (cost, min(ca), min(cb))
            if best is None or key < best[0]:
                best = (key, a, b)
        if best is None:
            break
        _, a, b = best
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]
    labels = np.empty(len(x), dtype=int)
    for c, members in enumerate(sorted(clusters, key=min)):
        labels[members] = c
    return labels


def test_path_split_matches_brute_force():
    x = np.array([0, 0.1, 0.2, 10, 10.1, 10.2])[:, None]
    a = rz.constrained_ward(x, path_graph(6), 2)
    assert a.labels.tolist() == [0, 0, 0, 1, 1, 1]
    # brute force: a connected 2-partition of a path is a single cut
    sse = [((x[:c] - x[:c].mean()) ** 2).sum() + ((x[c:] - x[c:].mean()) ** 2).sum() for c in range(1, 6)]
    assert int(np.argmin(sse)) + 1 == 3


def test_components_become_regions():
    adj = [[1], [0, 2], [1], [4], [3, 5], [4]]
    x = np.array([0.0, 5.0, 9.0, 0.1, 4.0, 8.0])[:, None]
    a = rz.constrained_ward(x, adj, 2)
    assert a.labels.tolist() == [0, 0, 0, 1, 1, 1]
    with pytest.raises(ValueError, match="components"):
        rz.constrained_ward(x, adj, 1)


def test_n_regions_equal_n_is_identity():
    x = np.random.default_rng(0).normal(size=(7, 2))
    assert rz.constrained_ward(x, path_graph(7), 7).labels.tolist() == list(range(7))


@pytest.mark.parametrize("r", [0, 8])
def test_n_regions_out_of_range(r):
    with pytest.raises(ValueError, match="n_regions"):
        rz.constrained_ward(np.zeros((7, 1)), path_graph(7), r)


def test_matches_naive_ward_on_random_graphs():
    rng = np.random.default_rng(8)
    for _ in range(25):
        n = int(rng.integers(5, 25))
        w = knn_weights(rng.uniform(size=(n, 2)), int(rng.integers(1, 4)))
        adj = w.adjacency_lists()
        x = rng.normal(size=(n, 3))
        tree = rz.ward_tree(x, w)
        for r in range(max(1, tree.n_components), n + 1, 3):
            assert tree.labels(r).tolist() == naive_ward(x, adj, r).tolist()


def test_ties_broken_by_smallest_member_pair():
    # every pair costs the same; the lowest (min a, min b) pair must merge first
    x = np.zeros((4, 1))
    tree = rz.ward_tree(x, [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
    assert [(a, b) for a, b, _ in tree.merges] == [(0, 1), (0, 2), (0, 3)]


def test_hierarchy_refines_by_one_merge():
    rng = np.random.default_rng(1)
    w = knn_weights(rng.uniform(size=(40, 2)), 4)
    tree = rz.ward_tree(rng.normal(size=(40, 3)), w)
    for r in range(2, 40):
        fine, coarse = tree.labels(r), tree.labels(r - 1)
        # every fine region sits inside one coarse region
        assert all(len(set(coarse[fine == f])) == 1 for f in range(r))
        assert len(set(map(tuple, np.column_stack([fine, coarse])))) == r


def test_voronoi_regions_connected_for_all_counts():
    geoms = synth.voronoi_geometries(100, seed=5)
    w = knn_weights(synth.centroids_of(geoms), 5)
    x = np.random.default_rng(2).normal(size=(100, 4))
    tree = rz.ward_tree(x, w)
    for r in range(2, 10):
        a = rz.RegionAssignment.from_labels(tree.labels(r), geoms)
        assert a.n_regions == r
        assert sum(len(m) for m in a.members) == 100
        assert all(rz.is_connected(m, w) for m in a.members)
        assert sum(g.area for g in a.geometries) == pytest.approx(1.0)


def test_is_connected():
    adj = path_graph(5)
    assert rz.is_connected([1, 2, 3], adj)
    assert not rz.is_connected([0, 2], adj)
    assert not rz.is_connected([], adj)


def silhouette_oracle(x, labels):
    n = len(x)
    out = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            out.append(0.0)
            continue
        a = np.mean([np.linalg.norm(x[i] - x[j]) for j in own])
        b = min(np.mean([np.linalg.norm(x[i] - x[j]) for j in range(n) if labels[j] == c])
                for c in set(labels) if c != labels[i])
        out.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return float(np.mean(out))


def test_silhouette_separated_blobs():
    rng = np.random.default_rng(0)
    x = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(10, 0.1, (20, 2))])
    labels = np.repeat([0, 1], 20)
    s = rz.silhouette(x, labels)
    assert s > 0.9
    assert s == pytest.approx(silhouette_oracle(x, labels), abs=1e-12)


def test_silhouette_identical_points():
    assert rz.silhouette(np.ones((6, 2)), [0, 0, 0, 1, 1, 1]) == 0.0


def test_silhouette_shuffled_labels():
    rng = np.random.default_rng(1)
    x = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(10, 0.1, (20, 2))])
    labels = rng.permutation(np.repeat([0, 1], 20))
    assert rz.silhouette(x, labels) < 0.1


def test_silhouette_singletons_and_oracle():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(12, 3))
    labels = np.array([0, 0, 1, 1, 1, 2, 3, 3, 3, 3, 4, 4])
    assert rz.silhouette(x, labels) == pytest.approx(silhouette_oracle(x, labels), abs=1e-12)


def test_silhouette_needs_two_clusters():
    with pytest.raises(ValueError, match="2 clusters"):
        rz.silhouette(np.zeros((4, 1)), [0, 0, 0, 0])


def test_calinski_harabasz_zero_within_is_capped():
    x = np.array([[0.0], [0.0], [5.0], [5.0]])
    with pytest.warns(RuntimeWarning, match="capped"):
        assert rz.calinski_harabasz(x, [0, 0, 1, 1]) == rz.CH_CAP


def test_calinski_harabasz_random_split_near_one():
    rng = np.random.default_rng(6)
    scores = []
    for _ in range(100):
        x = rng.normal(size=(60, 3))
        scores.append(rz.calinski_harabasz(x, rng.permutation(np.repeat([0, 1], 30))))
    assert abs(np.mean(scores) - 1.0) <= 0.5


def test_calinski_harabasz_grows_with_distance():
    rng = np.random.default_rng(7)
    base = rng.normal(size=(40, 2))
    labels = np.repeat([0, 1], 20)
    vals = []
    for d in (1, 2, 4):
        x = base.copy()
        x[20:, 0] += d
        vals.append(rz.calinski_harabasz(x, labels))
    assert vals[0] < vals[1] < vals[2]


def test_calinski_harabasz_formula():
    x = np.array([[0.0, 0], [1, 0], [0, 1], [5, 5], [6, 5]])
    labels = np.array([0, 0, 0, 1, 1])
    grand = x.mean(axis=0)
    b = sum((labels == c).sum() * ((x[labels == c].mean(0) - grand) ** 2).sum() for c in (0, 1))
    wv = sum(((x[labels == c] - x[labels == c].mean(0)) ** 2).sum() for c in (0, 1))
    assert rz.calinski_harabasz(x, labels) == pytest.approx((b / 1) / (wv / 3), rel=1e-12)


def test_calinski_harabasz_cluster_count_range():
    with pytest.raises(ValueError):
        rz.calinski_harabasz(np.arange(4.0)[:, None], [0, 1, 2, 3])


def test_sweep_recovers_planted_blocks():
    scen = synth.block_scenario(seed=0)
    w = scen.weights(5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        scores = rz.sweep_regions(scen.features.values, w, scen.geometries)
    assert scores.best("silhouette") == 6
    assert scores.best("calinski_harabasz") == 6
    found = scores.assignments[6].labels
    pairs = set(zip(found.tolist(), scen.planted.tolist()))
    assert len(pairs) == 6  # one-to-one up to relabelling
    for metric in (scores.norm_ipq, scores.norm_silhouette, scores.norm_calinski_harabasz):
        assert metric.max() == 1.0 and metric.min() == 0.0
    d = scores.to_dict()
    assert d["best"] == {"silhouette": 6, "calinski_harabasz": 6}
    assert 0.0 <= scores.ipq_trend() <= 1.0


def test_minmax_degenerate():
    assert rz._minmax(np.array([2.0, 2.0])).tolist() == [0.5, 0.5]


@given(st.integers(4, 20), st.integers(0, 10_000))
def test_every_output_region_is_connected(n, seed):
    rng = np.random.default_rng(seed)
    w = knn_weights(rng.uniform(size=(n, 2)), 2)
    x = rng.normal(size=(n, 2))
    tree = rz.ward_tree(x, w)
    for r in range(tree.n_components, n + 1):
        labels = tree.labels(r)
        assert len(set(labels.tolist())) == r
        assert all(rz.is_connected(np.flatnonzero(labels == c).tolist(), w) for c in range(r))
