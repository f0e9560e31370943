"""Standardizer, MLP, and linear SVM classifiers."""

import numpy as np
import pytest

from voicescreen.errors import DimensionMismatch, SingleClassData, TooFewRows
from voicescreen.models import (
    LinearSvmClassifier,
    MlpClassifier,
    Standardizer,
    load_model,
    mlp_gradient_check,
    predict,
    save_model,
)


def blobs(n_per=40, dims=4, gap=3.0, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 0.5, size=(n_per, dims))
    b = rng.normal(gap, 0.5, size=(n_per, dims))
    X = np.vstack([a, b])
    y = np.concatenate([np.zeros(n_per), np.ones(n_per)])
    return X, y


XOR_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_Y = np.array([0, 1, 1, 0])


class TestStandardizer:
    def test_two_point_column(self):
        s = Standardizer().fit([[0.0], [2.0]])
        np.testing.assert_allclose(s.transform([[0.0], [2.0]]), [[-1.0], [1.0]])

    def test_constant_column_maps_to_zero(self):
        s = Standardizer().fit([[5.0, 1.0], [5.0, 3.0]])
        out = s.transform([[5.0, 2.0]])
        assert out[0, 0] == 0.0

    def test_fitted_stats_on_random_matrix(self):
        X = np.random.default_rng(0).normal(2.0, 3.0, size=(100, 10))
        Z = Standardizer().fit(X).transform(X)
        assert np.max(np.abs(Z.mean(axis=0))) < 1e-9
        np.testing.assert_allclose(Z.std(axis=0), 1.0, atol=1e-9)

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            Standardizer().fit([[1.0, 2.0]])

    def test_dim_mismatch_at_transform(self):
        s = Standardizer().fit([[0.0, 1.0], [2.0, 3.0]])
        with pytest.raises(DimensionMismatch):
            s.transform([[1.0, 2.0, 3.0]])


class TestMlp:
    def test_learns_xor(self):
        m = MlpClassifier(hidden_dim=8, learning_rate=0.1, epochs=2000,
                          batch_size=4, l2=0.0, seed=0)
        m.fit(XOR_X, XOR_Y)
        assert np.array_equal(m.predict(XOR_X), XOR_Y)

    def test_separable_blobs(self):
        X, y = blobs()
        m = MlpClassifier(hidden_dim=16, learning_rate=0.05, epochs=200, seed=1)
        m.fit(X, y)
        assert np.mean(m.predict(X) == y) == 1.0

    def test_training_is_bitwise_deterministic(self):
        X, y = blobs(seed=2)
        a = MlpClassifier(seed=7).fit(X, y)
        b = MlpClassifier(seed=7).fit(X, y)
        for name in ("W1_", "b1_", "W2_", "b2_"):
            assert np.array_equal(getattr(a, name), getattr(b, name)), name

    def test_loss_decreases(self):
        X, y = blobs(seed=3)
        m = MlpClassifier(hidden_dim=8, learning_rate=0.05, epochs=50, seed=0)
        m.fit(X, y)
        assert m.final_loss_ < m.initial_loss_

    def test_gradient_check_random_draws(self):
        rng = np.random.default_rng(4)
        worst = 0.0
        for _ in range(20):
            d, h, n = rng.integers(2, 6), rng.integers(2, 6), rng.integers(3, 9)
            m = MlpClassifier(hidden_dim=int(h), l2=float(rng.uniform(0, 1e-2)),
                              seed=int(rng.integers(1000)))
            m.input_dim_ = int(d)
            m._init_params(int(d))
            X = rng.normal(size=(int(n), int(d)))
            y = rng.integers(0, 2, int(n)).astype(float)
            worst = max(worst, mlp_gradient_check(m, X, y))
        assert worst < 1e-4

    def test_zero_output_layer_bias_gradient(self):
        # with W2 = 0, b2 = 0 the output is p = 0.5 for every row, and the
        # bias gradient reduces to mean(p - y)
        rng = np.random.default_rng(5)
        m = MlpClassifier(hidden_dim=4, l2=0.0, seed=0)
        m.input_dim_ = 3
        m._init_params(3)
        m.W2_ = np.zeros_like(m.W2_)
        m.b2_ = np.zeros_like(m.b2_)
        X = rng.normal(size=(10, 3))
        y = rng.integers(0, 2, 10).astype(float)
        _, (_, _, _, gb2) = m._loss_and_grads(X, y)
        assert gb2[0] == pytest.approx(np.mean(0.5 - y), abs=1e-12)

    def test_gradient_independent_of_duplicated_batch(self):
        rng = np.random.default_rng(6)
        m = MlpClassifier(hidden_dim=5, l2=1e-3, seed=2)
        m.input_dim_ = 4
        m._init_params(4)
        X = rng.normal(size=(6, 4))
        y = rng.integers(0, 2, 6).astype(float)
        _, g1 = m._loss_and_grads(X, y)
        _, g2 = m._loss_and_grads(np.vstack([X, X]), np.concatenate([y, y]))
        for a, b in zip(g1, g2):
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_column_permutation_equivariance(self, monkeypatch):
        X, y = blobs(dims=3, seed=7)
        perm = np.array([2, 0, 1])

        m1 = MlpClassifier(hidden_dim=6, epochs=30, seed=0).fit(X, y)

        # re-train on permuted columns but with the first-layer init permuted
        # the same way; predictions must be identical
        W1_init = None

        def capture_init(self, input_dim, _orig=MlpClassifier._init_params):
            _orig(self, input_dim)
            nonlocal W1_init
            if W1_init is None:
                W1_init = self.W1_.copy()
            else:
                self.W1_ = W1_init[perm].copy()

        monkeypatch.setattr(MlpClassifier, "_init_params", capture_init)
        a = MlpClassifier(hidden_dim=6, epochs=30, seed=0).fit(X, y)
        b = MlpClassifier(hidden_dim=6, epochs=30, seed=0).fit(X[:, perm], y)
        np.testing.assert_allclose(a.predict_proba(X), b.predict_proba(X[:, perm]),
                                   atol=1e-10)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassData):
            MlpClassifier().fit(np.zeros((4, 2)), [1, 1, 1, 1])


class TestSvm:
    def test_zero_errors_on_separable_blobs(self):
        X, y = blobs(seed=8)
        m = LinearSvmClassifier(lam=1e-3, epochs=100, seed=0).fit(X, y)
        assert np.mean(m.predict(X) == y) == 1.0

    def test_label_flip_antisymmetry(self):
        X, y = blobs(seed=9)
        m1 = LinearSvmClassifier(lam=1e-3, epochs=20, seed=0).fit(X, y)
        m2 = LinearSvmClassifier(lam=1e-3, epochs=20, seed=0).fit(X, 1 - y)
        np.testing.assert_allclose(m2.w_, -m1.w_, atol=1e-6)
        assert m2.b_ == pytest.approx(-m1.b_, abs=1e-6)

    def test_heavy_regularization_shrinks_weights(self):
        X, y = blobs(seed=10)
        soft = LinearSvmClassifier(lam=1e-4, epochs=50, seed=0).fit(X, y)
        hard = LinearSvmClassifier(lam=1e3, epochs=50, seed=0).fit(X, y)
        assert np.linalg.norm(hard.w_) < np.linalg.norm(soft.w_)

    def test_deterministic(self):
        X, y = blobs(seed=11)
        a = LinearSvmClassifier(seed=3).fit(X, y)
        b = LinearSvmClassifier(seed=3).fit(X, y)
        assert np.array_equal(a.w_, b.w_) and a.b_ == b.b_


class TestPredictHelper:
    def test_mlp_tie_breaks_positive(self):
        m = MlpClassifier(hidden_dim=2)
        m.input_dim_ = 2
        m.W1_ = np.zeros((2, 2))
        m.b1_ = np.zeros(2)
        m.W2_ = np.zeros((2, 1))
        m.b2_ = np.zeros(1)
        score, label = predict(m, [0.3, -0.2])
        assert score == 0.5 and label == 1

    def test_svm_score_and_tie(self):
        m = LinearSvmClassifier()
        m.input_dim_ = 2
        m.w_ = np.array([1.0, 0.0])
        m.b_ = 0.0
        score, label = predict(m, [3.0, 7.0])
        assert score == 3.0 and label == 1
        score0, label0 = predict(m, [0.0, 5.0])
        assert score0 == 0.0 and label0 == 1


class TestCheckpoints:
    def test_mlp_round_trip(self, tmp_path):
        X, y = blobs(seed=12)
        m = MlpClassifier(hidden_dim=8, epochs=20, seed=1).fit(X, y)
        p = tmp_path / "m.json"
        save_model(p, m)
        back = load_model(p)
        assert np.array_equal(back.predict(X), m.predict(X))
        np.testing.assert_allclose(back.predict_proba(X), m.predict_proba(X),
                                   atol=1e-6)

    def test_svm_round_trip(self, tmp_path):
        X, y = blobs(seed=13)
        m = LinearSvmClassifier(lam=1e-3, epochs=30, seed=2).fit(X, y)
        p = tmp_path / "s.json"
        save_model(p, m)
        back = load_model(p)
        assert np.array_equal(back.predict(X), m.predict(X))
        np.testing.assert_allclose(back.decision_function(X),
                                   m.decision_function(X), rtol=1e-6)
