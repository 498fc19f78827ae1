"""One-hidden-layer perceptron in numpy with fixed sparsity masks.

ReLU hidden layer, softmax output, mean cross-entropy loss with optional L2
on the weights, He-normal init and Adam.  A layer's mask is drawn once
before training; masked weights start at zero and their gradients are
zeroed, so Adam never moves them.
"""

from __future__ import annotations

import dataclasses
import json
import struct
import time
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod

REPORT_VERSION = 1


class ShapeMismatchError(ValueError):
    pass


class NonFiniteLossError(FloatingPointError):
    pass


@dataclass(frozen=True)
class MlpConfig:
    layer_sizes: tuple[int, int, int] = (64, 1024, 64)
    density: float = 1.0
    l2_lambda: float = 0.0
    epochs: int = 30
    batch_size: int = 128
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    init_seed: int = 0
    shuffle_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        if len(self.layer_sizes) != 3 or min(self.layer_sizes) < 1:
            raise ValueError("layer_sizes must be three positive integers")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        rngmod.check_seed(self.init_seed)
        rngmod.check_seed(self.shuffle_seed)

    def replace(self, **changes) -> MlpConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["layer_sizes"] = list(self.layer_sizes)
        return d


@dataclass
class Network:
    weights: list[np.ndarray]
    masks: list[np.ndarray]
    biases: list[np.ndarray]
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    step: int = 0

    def __post_init__(self):
        if not self.m:
            self.m = [np.zeros_like(p) for p in self.params()]
            self.v = [np.zeros_like(p) for p in self.params()]

    def params(self) -> list[np.ndarray]:
        """Weights then biases, the order used by gradients and Adam state."""
        return [*self.weights, *self.biases]

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0], *(w.shape[1] for w in self.weights))

    @property
    def n_weights(self) -> int:
        return sum(int(mk.sum()) for mk in self.masks)

    @property
    def density(self) -> float:
        return self.n_weights / sum(w.size for w in self.weights)


@dataclass
class TrainReport:
    epoch_loss: list[float]
    epoch_train_accuracy: list[float]
    train_accuracy: float
    test_accuracy: float
    wall_clock_seconds: float

    @property
    def generalization_gap(self) -> float:
        return self.train_accuracy - self.test_accuracy

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "version": REPORT_VERSION,
            "kind": "train",
            "epoch_loss": self.epoch_loss,
            "epoch_train_accuracy": self.epoch_train_accuracy,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "train_minus_test": self.generalization_gap,
        }
        if timing:
            d["wall_clock_seconds"] = self.wall_clock_seconds
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2)


def make_mask(rows: int, cols: int, density: float, rng) -> np.ndarray:
    """0/1 matrix with exactly ``round(density*rows*cols)`` ones at uniform positions."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    size = rows * cols
    k = int(np.floor(density * size + 0.5))
    mask = np.zeros(size, dtype=np.float64)
    if k == size:
        mask[:] = 1.0
    elif k:
        mask[rng.choice(size, size=k, replace=False)] = 1.0
    return mask.reshape(rows, cols)


def init_network(cfg: MlpConfig) -> Network:
    sizes = cfg.layer_sizes
    weights, masks, biases = [], [], []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        mask = make_mask(fan_in, fan_out, cfg.density, rngmod.substream(cfg.init_seed, rngmod.MASK, i))
        w = rngmod.substream(cfg.init_seed, rngmod.INIT, i).normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out))
        weights.append(w * mask)
        masks.append(mask)
        biases.append(np.zeros(fan_out))
    return Network(weights, masks, biases)


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def forward(net: Network, batch) -> tuple[np.ndarray, np.ndarray]:
    """Hidden ReLU activations and class probabilities for each row of ``batch``."""
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.weights[0].shape[0]:
        raise ShapeMismatchError(f"expected (n, {net.weights[0].shape[0]}) input, got {x.shape}")
    hidden = np.maximum(x @ net.weights[0] + net.biases[0], 0.0)
    return hidden, softmax(hidden @ net.weights[1] + net.biases[1])


def loss_and_gradients(net: Network, x, y, l2_lambda: float = 0.0):
    """Mean cross-entropy plus ``l2_lambda/2 * sum(w**2)`` and its gradients.

    Gradients come back in :meth:`Network.params` order with masked entries
    zeroed.  Also returns the batch probabilities.
    """
    hidden, probs = forward(net, x)
    n = len(y)
    rows = np.arange(n)
    loss = -np.mean(np.log(np.maximum(probs[rows, y], 1e-300)))
    dlogits = probs.copy()
    dlogits[rows, y] -= 1.0
    dlogits /= n
    w1, w2 = net.weights
    gw2 = hidden.T @ dlogits
    gb2 = dlogits.sum(axis=0)
    dh = (dlogits @ w2.T) * (hidden > 0)
    gw1 = np.asarray(x, dtype=np.float64).T @ dh
    gb1 = dh.sum(axis=0)
    if l2_lambda:
        loss += 0.5 * l2_lambda * sum(float(np.sum(w * w)) for w in net.weights)
        gw1 += l2_lambda * w1
        gw2 += l2_lambda * w2
    gw1 *= net.masks[0]
    gw2 *= net.masks[1]
    return loss, [gw1, gw2, gb1, gb2], probs


def adam_step(net: Network, grads, cfg: MlpConfig) -> None:
    net.step += 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    c1 = 1 - b1**net.step
    c2 = 1 - b2**net.step
    for p, g, m, v in zip(net.params(), grads, net.m, net.v):
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.adam_epsilon)


def predict(net: Network, X) -> np.ndarray:
    """Argmax class per row; ties resolve to the lowest index."""
    return forward(net, X)[1].argmax(axis=1)


def accuracy(net: Network, X, y) -> float:
    if len(y) == 0:
        raise ValueError("cannot evaluate on an empty split")
    return 100.0 * float(np.mean(predict(net, X) == np.asarray(y)))


def evaluate(net: Network, dataset, split: str = "test") -> float:
    X, y = dataset.split(split)
    return accuracy(net, X, y)


def train(net: Network, dataset, cfg: MlpConfig, *, log=None) -> TrainReport:
    """Minibatch Adam over the training split, then score both splits.

    The final partial batch of each epoch is kept.  ``log`` (a callable taking
    a string) receives one line per epoch.
    """
    if dataset.n_features != net.weights[0].shape[0]:
        raise ShapeMismatchError(
            f"dataset has {dataset.n_features} features, network expects {net.weights[0].shape[0]}")
    X, y = dataset.split("train")
    shuffle_rng = rngmod.substream(cfg.shuffle_seed, rngmod.SHUFFLE)
    t0 = time.perf_counter()
    losses, accs = [], []
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(len(y))
        total_loss = 0.0
        correct = 0
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grads, probs = loss_and_gradients(net, X[idx], y[idx], cfg.l2_lambda)
            if not np.isfinite(loss):
                raise NonFiniteLossError(f"loss became {loss} in epoch {epoch + 1} at step {net.step + 1}")
            adam_step(net, grads, cfg)
            total_loss += loss * len(idx)
            correct += int((probs.argmax(axis=1) == y[idx]).sum())
        losses.append(total_loss / len(y))
        accs.append(100.0 * correct / len(y))
        if log is not None:
            log(f"epoch {epoch + 1}/{cfg.epochs} loss {losses[-1]:.4f} acc {accs[-1]:.2f}")
    train_acc = evaluate(net, dataset, "train")
    test_acc = evaluate(net, dataset, "test")
    return TrainReport(losses, accs, train_acc, test_acc, time.perf_counter() - t0)


_CKPT_MAGIC = b"MORSENN1"
_CKPT_VERSION = 1


def save_network(net: Network, path) -> None:
    """Checkpoint: magic, version, layer sizes, then per layer the mask as a
    little-endian bitset followed by float64 weights and biases."""
    sizes = net.layer_sizes
    with open(path, "wb") as f:
        f.write(_CKPT_MAGIC)
        f.write(struct.pack("<II", _CKPT_VERSION, len(sizes)))
        f.write(struct.pack(f"<{len(sizes)}I", *sizes))
        for w, mk, b in zip(net.weights, net.masks, net.biases):
            f.write(np.packbits(mk.ravel().astype(bool), bitorder="little").tobytes())
            f.write(w.astype("<f8").tobytes())
            f.write(b.astype("<f8").tobytes())


def load_network(path) -> Network:
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] != _CKPT_MAGIC:
        raise ValueError("not a network checkpoint (bad magic)")
    version, n = struct.unpack_from("<II", data, 8)
    if version != _CKPT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    sizes = struct.unpack_from(f"<{n}I", data, 16)
    pos = 16 + 4 * n
    weights, masks, biases = [], [], []
    for rows, cols in zip(sizes[:-1], sizes[1:]):
        nbytes = (rows * cols + 7) // 8
        bits = np.frombuffer(data, np.uint8, nbytes, pos)
        masks.append(np.unpackbits(bits, count=rows * cols, bitorder="little").reshape(rows, cols).astype(np.float64))
        pos += nbytes
        weights.append(np.frombuffer(data, "<f8", rows * cols, pos).reshape(rows, cols).copy())
        pos += 8 * rows * cols
        biases.append(np.frombuffer(data, "<f8", cols, pos).copy())
        pos += 8 * cols
    if pos != len(data):
        raise ValueError("checkpoint has trailing or missing bytes")
    return Network(weights, masks, biases)
