"""Two-layer graph convolutional classifier, from scratch on numpy.

forward(S, X) = softmax(S · relu(S · X · W1) · W2) with the symmetric
self-loop normalization S = D^{-1/2} (A + I) D^{-1/2}. Training uses
cross-entropy on the train split with an Adam-style adaptive optimizer and
early stopping on validation accuracy. Everything is deterministic given
the seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, ShapeError

@dataclass(frozen=True)
class Split:
    """Node index split; the three parts partition range(n)."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    seed: int = 0


def make_split(n, seed, train_frac=0.1, val_frac=0.1):
    """Random node split with round(frac * n) train/val sizes."""
    if not 0 < train_frac < 1 or not 0 < val_frac < 1 or train_frac + val_frac >= 1:
        raise ConfigError("split fractions must be positive and sum below 1")
    n_train = int(round(train_frac * n))
    n_val = int(round(val_frac * n))
    if n_train < 1 or n_val < 1 or n_train + n_val >= n:
        raise ConfigError(
            f"split of n = {n} leaves an empty part (train {n_train}, val {n_val})"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return Split(
        train=np.sort(perm[:n_train]),
        val=np.sort(perm[n_train:n_train + n_val]),
        test=np.sort(perm[n_train + n_val:]),
        seed=seed,
    )


@dataclass(frozen=True)
class GcnModel:
    """Weights of the two-layer network."""

    w1: np.ndarray
    w2: np.ndarray
    hidden: int = 16


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    learning_rate: float = 0.01
    weight_decay: float = 5e-4
    patience: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.patience < 0:
            raise ConfigError("epochs must be >= 1 and patience >= 0")
        if self.learning_rate <= 0 or self.weight_decay < 0:
            raise ConfigError("need learning_rate > 0 and weight_decay >= 0")


def normalize_adjacency(graph):
    """Self-loop symmetric normalization D^{-1/2} (A + I) D^{-1/2} (dense)."""
    a = graph.adjacency() + np.eye(graph.n)
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return a * inv_sqrt[:, None] * inv_sqrt[None, :]


def init_model(feature_dim, hidden, classes, seed):
    """Glorot-uniform initialization, seeded."""
    if hidden < 1 or classes < 2:
        raise ConfigError("need hidden >= 1 and classes >= 2")
    rng = np.random.default_rng(seed)

    def glorot(fan_in, fan_out):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    return GcnModel(
        w1=glorot(feature_dim, hidden), w2=glorot(hidden, classes), hidden=hidden
    )


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(model, s_norm, features):
    """Class probabilities per node; rows sum to one."""
    if features.shape[0] != s_norm.shape[0]:
        raise ShapeError(
            f"features rows {features.shape[0]} != adjacency size {s_norm.shape[0]}"
        )
    if features.shape[1] != model.w1.shape[0]:
        raise ShapeError(
            f"feature dim {features.shape[1]} != w1 rows {model.w1.shape[0]}"
        )
    hidden = np.maximum(s_norm @ (features @ model.w1), 0.0)
    logits = s_norm @ (hidden @ model.w2)
    probs = _softmax(logits)
    if not np.isfinite(probs).all():
        raise NumericError("forward pass produced non-finite probabilities")
    return probs


def loss_and_grads(model, s_norm, features, labels, idx):
    """Cross-entropy on the index set and its analytic weight gradients.

    Weight decay is not part of this loss; the optimizer applies it
    separately, so these gradients are directly comparable with finite
    differences of the returned loss.
    """
    idx = np.asarray(idx, dtype=int)
    if idx.size == 0:
        raise ConfigError("loss needs a non-empty index set")
    xw = s_norm @ (features @ model.w1)
    h = np.maximum(xw, 0.0)
    logits = s_norm @ (h @ model.w2)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = float(-log_probs[idx, labels[idx]].mean())

    d_logits = np.zeros_like(logits)
    probs = np.exp(log_probs)
    d_logits[idx] = probs[idx]
    d_logits[idx, labels[idx]] -= 1.0
    d_logits /= idx.size

    sh = s_norm @ h
    d_w2 = sh.T @ d_logits
    d_h = (s_norm.T @ d_logits) @ model.w2.T
    d_xw = d_h * (xw > 0.0)
    sx = s_norm @ features
    d_w1 = sx.T @ d_xw
    return loss, d_w1, d_w2


def predict(model, graph):
    """Argmax class per node; probability ties resolve to the lowest id."""
    probs = forward(model, normalize_adjacency(graph), graph.features)
    return np.argmax(probs, axis=1)


def evaluate(model, graph, split):
    """Accuracy on each part of the split."""
    if graph.labels is None:
        raise ConfigError("evaluate needs a labeled graph")
    pred = predict(model, graph)
    out = {}
    for name in ("train", "val", "test"):
        idx = getattr(split, name)
        out[name] = float((pred[idx] == graph.labels[idx]).mean())
    return out


def train(graph, split, config=None, hidden=16):
    """Fit the classifier; returns (model at best validation accuracy, history).

    history rows are (epoch, train_loss, val_acc) with the loss measured
    before the epoch's update. Adam moments follow the usual bias-corrected
    form; weight decay enters the update as a separate L2 pull. Training
    stops after `patience` epochs without validation improvement.
    """
    if config is None:
        config = TrainConfig()
    if graph.labels is None:
        raise ConfigError("train needs a labeled graph")
    classes = int(graph.labels.max()) + 1
    if classes < 2:
        raise ConfigError("training needs at least two classes")
    if np.unique(graph.labels[split.train]).size < 2:
        raise ConfigError("train split carries a single class; fit is degenerate")

    s_norm = normalize_adjacency(graph)
    model = init_model(graph.features.shape[1], hidden, classes, config.seed)
    w1 = model.w1.copy()
    w2 = model.w2.copy()

    b1, b2, eps = 0.9, 0.999, 1e-8
    moments = [np.zeros_like(w1), np.zeros_like(w1),
               np.zeros_like(w2), np.zeros_like(w2)]

    best_val = -1.0
    best = (w1.copy(), w2.copy())
    since_best = 0
    history = []
    for epoch in range(1, config.epochs + 1):
        current = GcnModel(w1=w1, w2=w2, hidden=hidden)
        loss, d_w1, d_w2 = loss_and_grads(
            current, s_norm, graph.features, graph.labels, split.train
        )
        d_w1 = d_w1 + config.weight_decay * w1
        d_w2 = d_w2 + config.weight_decay * w2
        t = epoch
        for w, g, slot in ((w1, d_w1, 0), (w2, d_w2, 2)):
            moments[slot] = b1 * moments[slot] + (1 - b1) * g
            moments[slot + 1] = b2 * moments[slot + 1] + (1 - b2) * g * g
            m_hat = moments[slot] / (1 - b1**t)
            v_hat = moments[slot + 1] / (1 - b2**t)
            w -= config.learning_rate * m_hat / (np.sqrt(v_hat) + eps)

        probs = forward(GcnModel(w1=w1, w2=w2, hidden=hidden), s_norm, graph.features)
        pred = np.argmax(probs, axis=1)
        val_acc = float((pred[split.val] == graph.labels[split.val]).mean())
        history.append((epoch, loss, val_acc))
        if val_acc > best_val:
            best_val = val_acc
            best = (w1.copy(), w2.copy())
            since_best = 0
        else:
            since_best += 1
            if since_best > config.patience:
                break
    return GcnModel(w1=best[0], w2=best[1], hidden=hidden), history
