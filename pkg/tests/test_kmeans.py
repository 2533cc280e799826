import itertools

import numpy as np
import pytest

from hoopstat.sampler import Counts, Priors, kmeans, kmeans_init, within_cluster_ss
from hoopstat.sampler.kmeans import accuracy_features, selection_features


def brute_force_two_partition_wcss(points):
    """Minimum within-cluster sum of squares over all 2-partitions.

    Points here are duplicated group prototypes, so enumerating how many of
    each prototype goes to cluster 1 covers every distinct partition.
    """
    points = np.asarray(points, float)
    uniq, inverse = np.unique(points, axis=0, return_inverse=True)
    group_sizes = np.bincount(inverse)
    best = np.inf
    ranges = [range(s + 1) for s in group_sizes]
    for takes in itertools.product(*ranges):
        takes = np.array(takes)
        n1 = takes.sum()
        n2 = group_sizes.sum() - n1
        if n1 == 0 or n2 == 0:
            continue
        c1 = (uniq * takes[:, None]).sum(axis=0) / n1
        c2 = (uniq * (group_sizes - takes)[:, None]).sum(axis=0) / n2
        ss = (takes[:, None] * (uniq - c1) ** 2).sum()
        ss += ((group_sizes - takes)[:, None] * (uniq - c2) ** 2).sum()
        best = min(best, float(ss))
    return best


def two_group_counts():
    """Ten entities shooting only ATB, ten only RA; accuracy differs too."""
    N = np.zeros((20, 7), dtype=np.int64)
    M = np.zeros((20, 7), dtype=np.int64)
    N[:10, 0] = 100
    M[:10, 0] = 45
    N[10:, 5] = 100
    M[10:, 5] = 70
    return Counts(attempts=N, makes=M)


class TestKmeans:
    def test_two_clean_groups_pure_and_optimal(self):
        counts = two_group_counts()
        feats = selection_features(counts)
        labels, _ = kmeans(feats, 2, np.random.default_rng(0))
        group_a, group_b = set(labels[:10]), set(labels[10:])
        assert len(group_a) == 1 and len(group_b) == 1 and group_a != group_b
        assert within_cluster_ss(feats, labels) == pytest.approx(
            brute_force_two_partition_wcss(feats), abs=1e-12
        )

    def test_deterministic_given_rng_seed(self):
        pts = np.random.default_rng(3).random((40, 5))
        l1, c1 = kmeans(pts, 4, np.random.default_rng(11))
        l2, c2 = kmeans(pts, 4, np.random.default_rng(11))
        assert np.array_equal(l1, l2) and np.array_equal(c1, c2)

    def test_more_clusters_than_points_leaves_empties(self):
        pts = np.zeros((2, 3))
        labels, _ = kmeans(pts, 5, np.random.default_rng(0))
        assert len(labels) == 2


class TestKmeansInit:
    def test_single_cluster_global_profile(self):
        counts = two_group_counts()
        state = kmeans_init(counts, Priors(L=1, J=1), seed=0)
        assert (state.w == 1).all() and (state.z == 1).all()
        # mean of per-entity proportion vectors: half shoot ATB only, half RA only
        assert state.p[0, 0] == pytest.approx(0.5)
        assert state.p[0, 5] == pytest.approx(0.5)
        # pooled make rates
        assert state.q[0, 0] == pytest.approx(0.45)
        assert state.q[0, 5] == pytest.approx(0.70)
        assert state.pi.tolist() == [1.0]
        assert state.theta.tolist() == [1.0]

    def test_two_groups_recovered_purely(self):
        counts = two_group_counts()
        state = kmeans_init(counts, Priors(L=2, J=2), seed=4)
        assert len(set(state.w[:10].tolist())) == 1
        assert len(set(state.w[10:].tolist())) == 1
        assert state.w[0] != state.w[10]
        atb_cluster = state.w[0] - 1
        assert state.p[atb_cluster, 0] == pytest.approx(1.0)
        assert state.q[state.z[0] - 1, 0] == pytest.approx(0.45)

    def test_state_valid_and_weights_floored(self):
        counts = two_group_counts()
        state = kmeans_init(counts, Priors(L=5, J=5), seed=9)
        state.validate()
        assert (state.pi > 0).all() and (state.theta > 0).all()

    def test_single_entity_excess_clusters_falls_back(self):
        counts = Counts(attempts=np.array([[10, 0]]), makes=np.array([[3, 0]]))
        with pytest.warns(UserWarning, match="more clusters than entities"):
            state = kmeans_init(counts, Priors(L=3, J=2), seed=0)
        state.validate()
        occupied = state.w[0] - 1
        empties = [l for l in range(3) if l != occupied]
        for l in empties:
            assert state.p[l].tolist() == [0.5, 0.5]
        assert (state.pi > 0).all()

    def test_zero_shot_entity_features_are_zero(self):
        counts = Counts(attempts=np.array([[0, 0], [4, 4]]), makes=np.array([[0, 0], [2, 0]]))
        assert selection_features(counts)[0].tolist() == [0.0, 0.0]
        assert accuracy_features(counts)[0].tolist() == [0.0, 0.0]
        assert accuracy_features(counts)[1].tolist() == [0.5, 0.0]
