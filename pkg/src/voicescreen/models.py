"""Classifiers for clip-level prediction.

Both models are deliberately small: a one-hidden-layer ReLU MLP with a
logistic output trained by mini-batch gradient descent, and a linear SVM
trained with the Pegasos stochastic subgradient method. Training is fully
deterministic for a fixed seed; all randomness flows through named streams
derived from it. The estimator API (fit/predict/get_params) follows sklearn
conventions so the models compose with standard tooling.

Class-threshold ties break toward the positive (depressed) class.
"""

import base64
import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from ._rng import derive_rng
from .errors import DimensionMismatch, SingleClassData, TooFewRows


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 32
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("learning_rate, epochs, batch_size must be positive")


def _check_X(X, expect_dims=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionMismatch(f"expected 2-D features, got shape {X.shape}")
    if expect_dims is not None and X.shape[1] != expect_dims:
        raise DimensionMismatch(f"model expects {expect_dims} dims, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    return X


def _check_binary_y(y, n_rows):
    y = np.asarray(y)
    if len(y) != n_rows:
        raise DimensionMismatch(f"{n_rows} rows but {len(y)} labels")
    y01 = np.where(y > 0, 1.0, 0.0)  # accepts {0,1} or {-1,+1}
    if len(np.unique(y01)) < 2:
        raise SingleClassData("training data contains a single class")
    return y01


class Standardizer(TransformerMixin, BaseEstimator):
    """Per-dimension mean/std scaling fitted on training rows only.

    Zero-variance dimensions keep scale 1, so constant columns map to zero
    without division errors.
    """

    def fit(self, X, y=None):
        X = _check_X(X)
        if X.shape[0] < 2:
            raise TooFewRows("standardizer needs >= 2 rows")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        return self

    def transform(self, X):
        X = _check_X(X, len(self.mean_))
        return (X - self.mean_) / self.scale_


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class MlpClassifier(ClassifierMixin, BaseEstimator):
    """One hidden ReLU layer, logistic output, binary cross-entropy loss."""

    def __init__(self, hidden_dim=64, learning_rate=1e-3, epochs=200,
                 batch_size=32, l2=1e-4, seed=0):
        self.hidden_dim = hidden_dim
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.l2 = l2
        self.seed = seed

    # -- internals ---------------------------------------------------------

    def _forward(self, X):
        h = np.maximum(0.0, X @ self.W1_ + self.b1_)
        p = _sigmoid(h @ self.W2_ + self.b2_)
        return h, p

    def _loss_and_grads(self, X, y):
        n = X.shape[0]
        h, p = self._forward(X)
        p = p[:, 0]
        eps = 1e-12
        loss = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
        loss += 0.5 * self.l2 * (np.sum(self.W1_ ** 2) + np.sum(self.W2_ ** 2))

        dz2 = (p - y)[:, None] / n              # d loss / d (h @ W2 + b2)
        gW2 = h.T @ dz2 + self.l2 * self.W2_
        gb2 = dz2.sum(axis=0)
        dh = dz2 @ self.W2_.T
        dh[h <= 0] = 0.0
        gW1 = X.T @ dh + self.l2 * self.W1_
        gb1 = dh.sum(axis=0)
        return loss, (gW1, gb1, gW2, gb2)

    def _init_params(self, input_dim):
        rng = derive_rng(self.seed, "mlp-init")
        lim1 = 1.0 / np.sqrt(input_dim)
        lim2 = 1.0 / np.sqrt(self.hidden_dim)
        self.W1_ = rng.uniform(-lim1, lim1, size=(input_dim, self.hidden_dim))
        self.b1_ = rng.uniform(-lim1, lim1, size=self.hidden_dim)
        self.W2_ = rng.uniform(-lim2, lim2, size=(self.hidden_dim, 1))
        self.b2_ = rng.uniform(-lim2, lim2, size=1)

    # -- estimator API -----------------------------------------------------

    def fit(self, X, y):
        X = _check_X(X)
        y = _check_binary_y(y, X.shape[0])
        self.input_dim_ = X.shape[1]
        self._init_params(self.input_dim_)
        shuffle = derive_rng(self.seed, "mlp-shuffle")
        n = X.shape[0]
        initial_loss, _ = self._loss_and_grads(X, y)
        for _ in range(self.epochs):
            order = shuffle.permutation(n)
            for start in range(0, n, self.batch_size):
                idx = order[start:start + self.batch_size]
                _, (gW1, gb1, gW2, gb2) = self._loss_and_grads(X[idx], y[idx])
                self.W1_ -= self.learning_rate * gW1
                self.b1_ -= self.learning_rate * gb1
                self.W2_ -= self.learning_rate * gW2
                self.b2_ -= self.learning_rate * gb2
        self.initial_loss_ = float(initial_loss)
        self.final_loss_ = float(self._loss_and_grads(X, y)[0])
        return self

    def predict_proba(self, X):
        X = _check_X(X, self.input_dim_)
        _, p = self._forward(X)
        return p[:, 0]

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(int)

    def score_and_label(self, x):
        p = float(self.predict_proba(np.atleast_2d(x))[0])
        return p, int(p >= 0.5)


def mlp_gradient_check(model: MlpClassifier, X, y, step: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients."""
    X = _check_X(X, model.input_dim_)
    y = np.asarray(y, dtype=np.float64)
    _, grads = model._loss_and_grads(X, y)
    worst = 0.0
    for name, g in zip(("W1_", "b1_", "W2_", "b2_"), grads):
        param = getattr(model, name)
        flat = param.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            lp, _ = model._loss_and_grads(X, y)
            flat[i] = orig - step
            lm, _ = model._loss_and_grads(X, y)
            flat[i] = orig
            numeric = (lp - lm) / (2 * step)
            analytic = g.ravel()[i]
            err = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-8)
            worst = max(worst, err)
    return worst


class LinearSvmClassifier(ClassifierMixin, BaseEstimator):
    """Linear SVM trained with the Pegasos stochastic subgradient method.

    Learning rate schedule 1/(lam * t). The bias decays with the weights
    (augmented-feature formulation); without the decay the huge first-step
    rate bakes early bias noise in permanently. Weights start at zero so
    training is exactly antisymmetric under a label flip.
    """

    def __init__(self, lam=1e-4, epochs=200, seed=0):
        self.lam = lam
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        X = _check_X(X)
        y01 = _check_binary_y(y, X.shape[0])
        ypm = 2.0 * y01 - 1.0
        n, d = X.shape
        self.input_dim_ = d
        w = np.zeros(d)
        b = 0.0
        shuffle = derive_rng(self.seed, "svm-shuffle")
        t = 0
        for _ in range(self.epochs):
            for i in shuffle.permutation(n):
                t += 1
                eta = 1.0 / (self.lam * t)
                margin = ypm[i] * (X[i] @ w + b)
                w *= (1.0 - eta * self.lam)
                b *= (1.0 - eta * self.lam)
                if margin < 1.0:
                    w += eta * ypm[i] * X[i]
                    b += eta * ypm[i]
        self.w_ = w
        self.b_ = float(b)
        return self

    def decision_function(self, X):
        X = _check_X(X, self.input_dim_)
        return X @ self.w_ + self.b_

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(int)

    def score_and_label(self, x):
        s = float(self.decision_function(np.atleast_2d(x))[0])
        return s, int(s >= 0.0)


def predict(model, x):
    """(score, label) for one standardized vector; ties go to the positive class."""
    return model.score_and_label(x)


# ---------------------------------------------------------------------------
# checkpoints

def save_model(path, model) -> None:
    """JSON header plus base64 float32 parameter blob."""
    if isinstance(model, MlpClassifier):
        params = [model.W1_, model.b1_, model.W2_, model.b2_]
        header = {"type": "mlp", "input_dim": model.input_dim_,
                  "hidden_dim": model.hidden_dim,
                  "hyperparameters": model.get_params(), "seed": model.seed}
    elif isinstance(model, LinearSvmClassifier):
        params = [model.w_, np.array([model.b_])]
        header = {"type": "svm", "input_dim": model.input_dim_,
                  "hyperparameters": model.get_params(), "seed": model.seed}
    else:
        raise TypeError(f"cannot checkpoint {type(model).__name__}")
    blob = b"".join(np.asarray(p, dtype="<f4").tobytes() for p in params)
    header["params"] = base64.b64encode(blob).decode("ascii")
    with open(path, "w") as fh:
        json.dump(header, fh, sort_keys=True)


def load_model(path):
    with open(path) as fh:
        header = json.load(fh)
    blob = np.frombuffer(base64.b64decode(header["params"]), dtype="<f4").astype(np.float64)
    d = header["input_dim"]
    if header["type"] == "mlp":
        h = header["hidden_dim"]
        model = MlpClassifier(**header["hyperparameters"])
        model.input_dim_ = d
        sizes = [d * h, h, h, 1]
        chunks = np.split(blob, np.cumsum(sizes)[:-1])
        model.W1_ = chunks[0].reshape(d, h)
        model.b1_ = chunks[1]
        model.W2_ = chunks[2].reshape(h, 1)
        model.b2_ = chunks[3]
        return model
    if header["type"] == "svm":
        model = LinearSvmClassifier(**header["hyperparameters"])
        model.input_dim_ = d
        model.w_ = blob[:d]
        model.b_ = float(blob[d])
        return model
    raise ValueError(f"unknown checkpoint type {header['type']!r}")
