import numpy as np
import pytest

from cjs.clustering import ClusteringParams, build_anchor_subspaces
from cjs.data import DomainDataset
from cjs.errors import EmptyClass
from cjs.linalg import orthonormal_basis
from cjs.subspaces import (build_affinities, build_class_subspaces,
                           median_sigma, subspace_distance)
from cjs.synth import synth_generate


class TestSubspaceDistance:
    def test_identical_spans_zero(self):
        rng = np.random.default_rng(0)
        samples = rng.normal(size=(10, 4))
        b1 = orthonormal_basis(samples)
        b2 = orthonormal_basis(samples @ rng.normal(size=(4, 6)))
        assert subspace_distance(b1, b2) < 1e-8

    def test_orthogonal_planes(self):
        b1 = np.eye(4)[:, :2]
        b2 = np.eye(4)[:, 2:]
        np.testing.assert_allclose(subspace_distance(b1, b2), 2.0)

    def test_forty_five_degree_line(self):
        b1 = np.array([[1.0], [0.0]])
        b2 = np.array([[1.0], [1.0]]) / np.sqrt(2.0)
        np.testing.assert_allclose(subspace_distance(b1, b2),
                                   np.sqrt(2.0) / 2.0, atol=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        b1 = orthonormal_basis(rng.normal(size=(12, 3)))
        b2 = orthonormal_basis(rng.normal(size=(12, 5)))
        assert abs(subspace_distance(b1, b2)
                   - subspace_distance(b2, b1)) < 1e-10

    def test_containment_gives_zero(self):
        rng = np.random.default_rng(2)
        big = orthonormal_basis(rng.normal(size=(10, 6)))
        small = orthonormal_basis(big @ rng.normal(size=(6, 2)))
        assert subspace_distance(small, big) < 1e-8

    def test_bounded_by_min_rank(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            b1 = orthonormal_basis(rng.normal(size=(9, 2)))
            b2 = orthonormal_basis(rng.normal(size=(9, 4)))
            d = subspace_distance(b1, b2)
            assert 0.0 <= d <= 2.0


class TestClassSubspaces:
    def test_builds_per_class(self):
        rng = np.random.default_rng(4)
        ds = DomainDataset(rng.normal(size=(6, 10)),
                           labels=np.array([0, 0, 1, 1, 1, 2, 2, 2, 2, 0]))
        subs = build_class_subspaces(ds)
        assert [s.class_index for s in subs] == [0, 1, 2]
        np.testing.assert_array_equal(subs[0].member_indices, [0, 1, 9])
        assert subs[1].samples.shape == (6, 3)

    def test_empty_class(self):
        ds = DomainDataset(np.ones((3, 2)), labels=np.array([0, 2]))
        with pytest.raises(EmptyClass):
            build_class_subspaces(ds)

    def test_needs_labels(self):
        with pytest.raises(ValueError):
            build_class_subspaces(DomainDataset(np.ones((2, 2))))


class TestMedianSigma:
    def test_plain_median(self):
        assert median_sigma(np.array([1.0, 2.0, 3.0])) == 2.0

    def test_zero_median_falls_back_to_positive(self):
        assert median_sigma(np.array([0.0, 0.0, 0.0, 4.0])) == 4.0

    def test_all_zero_falls_back_to_one(self):
        assert median_sigma(np.zeros(5)) == 1.0


def small_problem(seed=0, n_classes=3):
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=40.0, size=(8, n_classes))
    cols, labels = [], []
    for c in range(n_classes):
        cols.append(centers[:, [c]] + rng.normal(scale=0.3, size=(8, 30)))
        labels.append(np.full(30, c))
    source = DomainDataset(np.hstack(cols), labels=np.concatenate(labels))
    target = np.hstack([centers[:, [c]] + rng.normal(scale=0.3, size=(8, 30))
                        for c in range(n_classes)])
    sources = build_class_subspaces(source)
    anchors = build_anchor_subspaces(
        target, ClusteringParams(gamma=15, anchor_size=5, seed=seed))
    return sources, anchors


class TestAffinities:
    def test_shapes_and_ranges(self):
        sources, anchors = small_problem()
        pair = build_affinities(sources, anchors)
        C, K = len(sources), len(anchors)
        assert pair.a_st.shape == (C, K)
        assert pair.a_tt.shape == (K, K)
        assert np.all(pair.a_st > 0.0) and np.all(pair.a_st <= 1.0)
        assert np.all(pair.a_tt > 0.0) and np.all(pair.a_tt <= 1.0)
        np.testing.assert_allclose(np.diag(pair.a_tt), 1.0)
        np.testing.assert_allclose(pair.a_tt, pair.a_tt.T)

    def test_exponential_formula(self):
        sources, anchors = small_problem(1)
        sigma = 0.8
        pair = build_affinities(sources, anchors, sigma=sigma)
        np.testing.assert_allclose(
            pair.a_st, np.exp(-pair.d_st / (2.0 * sigma**2)))
        # distance of exactly 2 sigma^2 gives e^-1
        assert abs(np.exp(-(2 * sigma**2) / (2 * sigma**2))
                   - np.exp(-1.0)) < 1e-15

    def test_affinity_monotone_in_distance(self):
        sources, anchors = small_problem(2)
        pair = build_affinities(sources, anchors, sigma=1.0)
        flat_d = pair.d_st.ravel()
        flat_a = pair.a_st.ravel()
        order = np.argsort(flat_d)
        assert np.all(np.diff(flat_a[order]) <= 1e-15)

    def test_zero_distance_gives_unit_affinity(self):
        sources, _ = small_problem(3)
        anchors_same = build_anchor_subspaces(
            sources[0].samples, ClusteringParams(gamma=15, anchor_size=5))
        pair = build_affinities(sources, anchors_same, sigma=1.0)
        # anchor spans a subset of class-0 span: distance 0, affinity 1
        assert pair.a_st[0, 0] > 0.999999

    def test_same_class_affinity_exceeds_cross(self):
        wins = 0
        for seed in range(20):
            source, target = synth_generate(2, 20, 3, 40, 0.25, 0.01,
                                            seed=seed)
            sources = build_class_subspaces(source)
            anchors = build_anchor_subspaces(
                target.features, ClusteringParams(gamma=20, anchor_size=5,
                                                  seed=seed))
            pair = build_affinities(sources, anchors)
            truth = np.array([np.bincount(target.labels[a.member_indices],
                                          minlength=2).argmax()
                              for a in anchors])
            same = pair.a_st[truth, np.arange(len(anchors))]
            cross = pair.a_st[1 - truth, np.arange(len(anchors))]
            wins += same.mean() > cross.mean()
        assert wins == 20
