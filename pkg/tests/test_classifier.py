import numpy as np
import pytest

from cjs.classifier import (assemble_joint_subspaces, load_model, predict,
                            save_model, train_ovr_svm, LinearOvrModel)
from cjs.clustering import AnchorSubspace
from cjs.data import DomainDataset, LabelMatrix, one_hot_encode
from cjs.errors import DimensionMismatch, EmptyClass
from cjs.linalg import orthonormal_basis
from cjs.subspaces import build_class_subspaces


def make_anchor(target_features, indices):
    samples = target_features[:, indices]
    return AnchorSubspace(member_indices=np.asarray(indices, dtype=np.int64),
                          samples=samples,
                          basis=orthonormal_basis(samples))


def separable_source(seed=0, n_per=20, gap=8.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, n_per)) + np.array([[gap], [0.0]])
    b = rng.normal(size=(2, n_per)) - np.array([[gap], [0.0]])
    feats = np.hstack([a, b])
    labels = np.concatenate([np.zeros(n_per, int), np.ones(n_per, int)])
    return DomainDataset(feats, labels=labels)


class TestAssembly:
    def setup_method(self):
        rng = np.random.default_rng(1)
        self.source = DomainDataset(rng.normal(size=(4, 8)),
                                    labels=np.array([0, 0, 0, 0, 1, 1, 1, 1]))
        self.target = DomainDataset(rng.normal(size=(4, 15)))
        self.sources = build_class_subspaces(self.source)
        self.anchors = [make_anchor(self.target.features, idx)
                        for idx in ([0, 1, 2], [3, 4, 5], [6, 7, 8])]

    def test_assignment_example(self):
        labels = one_hot_encode([0, 1, 0], 2)
        joint = assemble_joint_subspaces(self.sources, self.anchors, labels)
        np.testing.assert_array_equal(joint[0].anchor_members,
                                      [0, 1, 2, 6, 7, 8])
        np.testing.assert_array_equal(joint[1].anchor_members, [3, 4, 5])
        np.testing.assert_array_equal(joint[0].source_members, [0, 1, 2, 3])

    def test_no_anchors_identity(self):
        joint = assemble_joint_subspaces(
            self.sources, [], LabelMatrix(np.zeros((2, 0)), hard=True))
        for sub, src in zip(joint, self.sources):
            np.testing.assert_array_equal(sub.source_members,
                                          src.member_indices)
            assert sub.anchor_members.size == 0

    def test_sample_conservation(self):
        labels = one_hot_encode([1, 1, 0], 2)
        joint = assemble_joint_subspaces(self.sources, self.anchors, labels)
        total = sum(sub.anchor_members.size for sub in joint)
        assert total == 3 * 3  # K anchors x N members

    def test_soft_labels_rejected(self):
        soft = LabelMatrix(np.full((2, 3), 0.5), hard=False)
        with pytest.raises(ValueError):
            assemble_joint_subspaces(self.sources, self.anchors, soft)


class TestTraining:
    def test_separable_data_perfect_training_accuracy(self):
        source = separable_source()
        target = DomainDataset(source.features.copy())
        sources = build_class_subspaces(source)
        joint = assemble_joint_subspaces(
            sources, [], LabelMatrix(np.zeros((2, 0)), hard=True))
        model = train_ovr_svm(joint, source, target, reg_c=100.0)
        preds = predict(model, source.features)
        np.testing.assert_array_equal(preds, source.labels)

    def test_duplication_invariance(self):
        source = separable_source(seed=2, gap=3.0)
        doubled = DomainDataset(
            np.hstack([source.features, source.features]),
            labels=np.concatenate([source.labels, source.labels]))
        target = DomainDataset(source.features.copy())
        m1 = train_ovr_svm(
            assemble_joint_subspaces(build_class_subspaces(source), [],
                                     LabelMatrix(np.zeros((2, 0)))),
            source, target, seed=0, gap_tol=1e-10)
        m2 = train_ovr_svm(
            assemble_joint_subspaces(build_class_subspaces(doubled), [],
                                     LabelMatrix(np.zeros((2, 0)))),
            doubled, target, seed=0, gap_tol=1e-10)
        rng = np.random.default_rng(3)
        probe = rng.normal(scale=4.0, size=(2, 200))
        s1 = m1.weights @ probe + m1.biases[:, None]
        s2 = m2.weights @ probe + m2.biases[:, None]
        assert np.abs(s1 - s2).max() < 1e-6

    def test_empty_class(self):
        source = separable_source()
        target = DomainDataset(source.features.copy())
        sources = build_class_subspaces(source)
        joint = assemble_joint_subspaces(
            sources, [], LabelMatrix(np.zeros((2, 0))))
        from cjs.classifier import CompactJointSubspace
        broken = [joint[0], CompactJointSubspace(
            class_index=1, source_members=np.empty(0, dtype=np.int64),
            anchor_members=np.empty(0, dtype=np.int64))]
        with pytest.raises(EmptyClass):
            train_ovr_svm(broken, source, target)

    def test_deterministic(self):
        source = separable_source(seed=4, gap=2.0)
        target = DomainDataset(source.features.copy())
        joint = assemble_joint_subspaces(build_class_subspaces(source), [],
                                         LabelMatrix(np.zeros((2, 0))))
        m1 = train_ovr_svm(joint, source, target, seed=9)
        m2 = train_ovr_svm(joint, source, target, seed=9)
        np.testing.assert_array_equal(m1.weights, m2.weights)
        np.testing.assert_array_equal(m1.biases, m2.biases)

    def test_anchor_samples_join_training(self):
        source = separable_source(seed=5, gap=6.0)
        rng = np.random.default_rng(5)
        # target cluster for class 1 sits elsewhere; anchors labeled 1
        tgt = np.hstack([rng.normal(size=(2, 10)) + np.array([[0.0], [9.0]])])
        target = DomainDataset(tgt)
        anchors = [make_anchor(target.features, [0, 1, 2, 3, 4])]
        joint = assemble_joint_subspaces(build_class_subspaces(source),
                                         anchors, one_hot_encode([1], 2))
        model = train_ovr_svm(joint, source, target, reg_c=50.0)
        preds = predict(model, target.features[:, :5])
        np.testing.assert_array_equal(preds, np.ones(5, dtype=int))


class TestPredict:
    def test_training_labels_recovered(self):
        source = separable_source(seed=6)
        joint = assemble_joint_subspaces(build_class_subspaces(source), [],
                                         LabelMatrix(np.zeros((2, 0))))
        model = train_ovr_svm(joint, source,
                              DomainDataset(source.features.copy()))
        np.testing.assert_array_equal(predict(model, source.features),
                                      source.labels)

    def test_single_class_degenerates(self):
        model = LinearOvrModel(weights=np.array([[0.5, -1.0]]),
                               biases=np.array([0.3]), reg_c=1.0)
        preds = predict(model, np.random.default_rng(0).normal(size=(2, 9)))
        np.testing.assert_array_equal(preds, np.zeros(9, dtype=int))

    def test_uniform_bias_shift_invariance(self):
        rng = np.random.default_rng(7)
        model = LinearOvrModel(weights=rng.normal(size=(3, 4)),
                               biases=rng.normal(size=3), reg_c=1.0)
        shifted = LinearOvrModel(weights=model.weights,
                                 biases=model.biases + 5.5, reg_c=1.0)
        probe = rng.normal(size=(4, 50))
        np.testing.assert_array_equal(predict(model, probe),
                                      predict(shifted, probe))

    def test_class_permutation_equivariance(self):
        rng = np.random.default_rng(8)
        model = LinearOvrModel(weights=rng.normal(size=(4, 3)),
                               biases=rng.normal(size=4), reg_c=1.0)
        perm = np.array([2, 0, 3, 1])
        permuted = LinearOvrModel(weights=model.weights[perm],
                                  biases=model.biases[perm], reg_c=1.0)
        probe = rng.normal(size=(3, 40))
        base = predict(model, probe)
        inverse = np.argsort(perm)
        np.testing.assert_array_equal(predict(permuted, probe),
                                      inverse[base])

    def test_dimension_mismatch(self):
        model = LinearOvrModel(weights=np.ones((2, 3)),
                               biases=np.zeros(2), reg_c=1.0)
        with pytest.raises(DimensionMismatch):
            predict(model, np.ones((4, 5)))


class TestSerialization:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        model = LinearOvrModel(weights=rng.normal(size=(3, 7)),
                               biases=rng.normal(size=3), reg_c=2.5)
        path = tmp_path / "model.npz"
        save_model(model, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(loaded.weights, model.weights)
        np.testing.assert_array_equal(loaded.biases, model.biases)
        assert loaded.reg_c == model.reg_c
