import numpy as np
import pytest

from cjs.errors import BadDimensions
from cjs.pipeline import class_distance_matrix
from cjs.subspaces import build_class_subspaces, subspace_distance
from cjs.synth import synth_generate


class TestSynthGenerate:
    def test_shapes_and_labels(self):
        source, target = synth_generate(4, 50, 3, 25, 0.3, 0.01, seed=0)
        assert source.features.shape == (50, 100)
        assert target.features.shape == (50, 100)
        np.testing.assert_array_equal(np.bincount(source.labels), [25] * 4)
        np.testing.assert_array_equal(np.bincount(target.labels), [25] * 4)

    def test_deterministic(self):
        a = synth_generate(3, 30, 2, 10, 0.2, 0.05, seed=42)
        b = synth_generate(3, 30, 2, 10, 0.2, 0.05, seed=42)
        np.testing.assert_array_equal(a[0].features, b[0].features)
        np.testing.assert_array_equal(a[1].features, b[1].features)
        c = synth_generate(3, 30, 2, 10, 0.2, 0.05, seed=43)
        assert not np.array_equal(a[0].features, c[0].features)

    def test_zero_rotation_zero_noise_identical_subspaces(self):
        source, target = synth_generate(3, 30, 3, 20, 0.0, 0.0, seed=1)
        for c in range(3):
            bs = build_class_subspaces(source)[c].basis
            bt = build_class_subspaces(target)[c].basis
            assert subspace_distance(bs, bt) < 1e-8

    def test_orthogonal_rotation_line_distance_one(self):
        source, target = synth_generate(3, 30, 1, 15, np.pi / 2, 0.0, seed=2)
        for c in range(3):
            bs = build_class_subspaces(source)[c].basis
            bt = build_class_subspaces(target)[c].basis
            assert abs(subspace_distance(bs, bt) - 1.0) < 1e-8

    def test_same_class_distances_dominate(self):
        # mirrors the qualitative cross-domain distance table structure
        hits = total = 0
        for seed in range(20):
            source, target = synth_generate(4, 50, 3, 100, 0.3, 0.01,
                                            seed=100 + seed)
            matrix = class_distance_matrix(source, target, rank_tol=5e-2)
            for c in range(4):
                for k in range(4):
                    if c == k:
                        continue
                    total += 1
                    hits += matrix[c, c] < matrix[c, k]
        assert hits / total >= 0.95

    def test_bad_dimensions(self):
        with pytest.raises(BadDimensions):
            synth_generate(4, 10, 3, 5, 0.3, 0.0, seed=0)  # frames don't fit
        with pytest.raises(BadDimensions):
            synth_generate(2, 5, 5, 5, 0.3, 0.0, seed=0)  # r >= d

    def test_angle_and_noise_validation(self):
        with pytest.raises(ValueError):
            synth_generate(2, 30, 2, 5, -0.1, 0.0, seed=0)
        with pytest.raises(ValueError):
            synth_generate(2, 30, 2, 5, 2.0, 0.0, seed=0)
        with pytest.raises(ValueError):
            synth_generate(2, 30, 2, 5, 0.3, -1.0, seed=0)

    def test_single_class_supported(self):
        source, target = synth_generate(1, 20, 2, 10, 0.4, 0.01, seed=3)
        assert source.n_classes == 1 and target.n_classes == 1
