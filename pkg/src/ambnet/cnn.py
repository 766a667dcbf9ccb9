"""Minimal convolutional network with hand-written forward/backward passes.

Everything is float64 numpy, layout NCHW. Convolutions are valid (no
padding), pooling is 2x2 stride 2 with floor truncation on odd sides, and
parameters update in place, so a training run is a deterministic function of
(data, hyperparameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ARCHITECTURE = (
    ("conv", 8, 5),
    ("relu",),
    ("pool", 2),
    ("conv", 16, 5),
    ("relu",),
    ("pool", 2),
    ("flatten",),
    ("dense", 64),
    ("relu",),
    ("dense", 4),
)


class TrainingDivergenceError(RuntimeError):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, learning_rate: float):
        super().__init__(
            f"training diverged at epoch {epoch} (learning rate {learning_rate:g})"
        )
        self.epoch = epoch
        self.learning_rate = learning_rate


def _he_uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


class Conv2d:
    """Valid cross-correlation with bias, implemented via im2col."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 rng: np.random.Generator):
        self.kernel_size = kernel_size
        w = _he_uniform(rng, in_channels * kernel_size**2,
                        (out_channels, in_channels, kernel_size, kernel_size))
        # Small positive bias keeps all-black windows (exact zero response,
        # common in sparse binary images) off the rectifier kink, where
        # finite differences would disagree with the subgradient.
        self.params = {"w": w, "b": np.full(out_channels, 0.01)}
        self.grads = {name: np.zeros_like(p) for name, p in self.params.items()}

    def forward(self, x: np.ndarray) -> np.ndarray:
        batch, channels, _, _ = x.shape
        k = self.kernel_size
        win = np.lib.stride_tricks.sliding_window_view(x, (k, k), axis=(2, 3))
        oh, ow = win.shape[2], win.shape[3]
        cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(batch, oh * ow, channels * k * k)
        wmat = self.params["w"].reshape(self.params["w"].shape[0], -1)
        out = cols @ wmat.T + self.params["b"]
        self._cache = (cols, x.shape)
        return out.transpose(0, 2, 1).reshape(batch, -1, oh, ow)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        cols, x_shape = self._cache
        batch, channels, _, _ = x_shape
        _, out_channels, oh, ow = dout.shape
        k = self.kernel_size
        dmat = dout.reshape(batch, out_channels, oh * ow).transpose(0, 2, 1)
        self.grads["w"][...] = np.tensordot(dmat, cols, axes=([0, 1], [0, 1])).reshape(
            self.params["w"].shape
        )
        self.grads["b"][...] = dout.sum(axis=(0, 2, 3))
        dcols = dmat @ self.params["w"].reshape(out_channels, -1)
        dwin = dcols.reshape(batch, oh, ow, channels, k, k)
        dx = np.zeros(x_shape)
        for di in range(k):
            for dj in range(k):
                dx[:, :, di:di + oh, dj:dj + ow] += dwin[:, :, :, :, di, dj].transpose(0, 3, 1, 2)
        return dx


class ReLU:
    params: dict = {}
    grads: dict = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return x * self._mask

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout * self._mask


class MaxPool2:
    """2x2 max pooling, stride 2; odd trailing rows/columns are dropped."""

    params: dict = {}
    grads: dict = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        batch, channels, h, w = x.shape
        ph, pw = h // 2, w // 2
        windows = (
            x[:, :, : 2 * ph, : 2 * pw]
            .reshape(batch, channels, ph, 2, pw, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(batch, channels, ph, pw, 4)
        )
        self._argmax = windows.argmax(axis=-1)
        self._x_shape = x.shape
        return np.take_along_axis(windows, self._argmax[..., None], axis=-1)[..., 0]

    def backward(self, dout: np.ndarray) -> np.ndarray:
        batch, channels, h, w = self._x_shape
        ph, pw = h // 2, w // 2
        dwindows = np.zeros((batch, channels, ph, pw, 4))
        np.put_along_axis(dwindows, self._argmax[..., None], dout[..., None], axis=-1)
        dx = np.zeros(self._x_shape)
        dx[:, :, : 2 * ph, : 2 * pw] = (
            dwindows.reshape(batch, channels, ph, pw, 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(batch, channels, 2 * ph, 2 * pw)
        )
        return dx


class Flatten:
    params: dict = {}
    grads: dict = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout.reshape(self._shape)


class Dense:
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        self.params = {
            "w": _he_uniform(rng, in_features, (in_features, out_features)),
            "b": np.full(out_features, 0.01),
        }
        self.grads = {name: np.zeros_like(p) for name, p in self.params.items()}

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, dout: np.ndarray) -> np.ndarray:
        self.grads["w"][...] = self._x.T @ dout
        self.grads["b"][...] = dout.sum(axis=0)
        return dout @ self.params["w"].T


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def cross_entropy(probs: np.ndarray, y: np.ndarray) -> float:
    # An underflowed probability yields an infinite loss, which the training
    # loop treats as divergence rather than an arithmetic error.
    with np.errstate(divide="ignore"):
        return float(-np.log(probs[np.arange(len(y)), y]).mean())


def softmax_cross_entropy(logits: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient with respect to the logits."""
    probs = softmax(logits)
    loss = cross_entropy(probs, y)
    dlogits = probs.copy()
    dlogits[np.arange(len(y)), y] -= 1.0
    return loss, dlogits / len(y)


class Network:
    """Layer stack; holds the architecture descriptor it was built from."""

    def __init__(self, layers: list, architecture: tuple, input_side: int):
        self.layers = layers
        self.architecture = architecture
        self.input_side = input_side

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dout: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def param_blocks(self) -> list[tuple[str, np.ndarray, np.ndarray]]:
        """(name, parameter, gradient) triples in a fixed traversal order."""
        blocks = []
        for i, layer in enumerate(self.layers):
            for name in sorted(layer.params):
                blocks.append(
                    (f"layer{i}_{type(layer).__name__.lower()}_{name}",
                     layer.params[name], layer.grads[name])
                )
        return blocks

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        probs = softmax(self.forward(x))
        return cross_entropy(probs, y)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.forward(x))


def build_network(architecture, input_side: int, rng: np.random.Generator) -> Network:
    """Instantiate layers, checking that every spatial size stays positive."""
    architecture = tuple(tuple(spec) for spec in architecture)
    layers: list = []
    shape: tuple = (1, input_side, input_side)
    flat: int | None = None
    for spec in architecture:
        kind = spec[0]
        if kind == "conv":
            _, out_channels, kernel = spec
            c, h, w = shape
            if h < kernel or w < kernel:
                raise ValueError(f"input {h}x{w} too small for {kernel}x{kernel} convolution")
            layers.append(Conv2d(c, out_channels, kernel, rng))
            shape = (out_channels, h - kernel + 1, w - kernel + 1)
        elif kind == "relu":
            layers.append(ReLU())
        elif kind == "pool":
            if len(spec) > 1 and spec[1] != 2:
                raise ValueError("only 2x2 pooling is supported")
            c, h, w = shape
            if h < 2 or w < 2:
                raise ValueError(f"input {h}x{w} too small for 2x2 pooling")
            layers.append(MaxPool2())
            shape = (c, h // 2, w // 2)
        elif kind == "flatten":
            layers.append(Flatten())
            flat = int(np.prod(shape))
        elif kind == "dense":
            if flat is None:
                raise ValueError("dense layer requires a preceding flatten")
            layers.append(Dense(flat, spec[1], rng))
            flat = spec[1]
        else:
            raise ValueError(f"unknown layer kind {kind!r}")
    return Network(layers, architecture, input_side)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 0.01
    momentum: float = 0.9
    decay_every: int = 10
    decay_factor: float = 0.5
    target_loss: float | None = None  # stop early once epoch mean loss dips below

    def to_json(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "decay_every": self.decay_every,
            "decay_factor": self.decay_factor,
            "target_loss": self.target_loss,
        }


def train_sgd(net: Network, x: np.ndarray, y: np.ndarray, config: TrainConfig,
              seed: int = 0) -> list[float]:
    """Mini-batch SGD with momentum and step decay; returns the loss curve.

    Raises :class:`TrainingDivergenceError` if the loss goes non-finite.
    """
    rng = np.random.default_rng(seed)
    velocity = {name: np.zeros_like(param) for name, param, _ in net.param_blocks()}
    curve: list[float] = []
    for epoch in range(config.epochs):
        lr = config.learning_rate * config.decay_factor ** (epoch // config.decay_every)
        order = rng.permutation(len(x))
        total = 0.0
        for start in range(0, len(x), config.batch_size):
            idx = order[start : start + config.batch_size]
            logits = net.forward(x[idx])
            loss, dlogits = softmax_cross_entropy(logits, y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergenceError(epoch, lr)
            net.backward(dlogits)
            for name, param, grad in net.param_blocks():
                vel = velocity[name]
                vel *= config.momentum
                vel -= lr * grad
                param += vel
            total += loss * len(idx)
        curve.append(total / len(x))
        if config.target_loss is not None and curve[-1] < config.target_loss:
            break
    return curve


def _routing_signature(net: Network) -> list[np.ndarray]:
    """Rectifier masks and pooling argmax choices from the last forward pass."""
    sig = []
    for layer in net.layers:
        if isinstance(layer, ReLU):
            sig.append(layer._mask.copy())
        elif isinstance(layer, MaxPool2):
            sig.append(layer._argmax.copy())
    return sig


def finite_difference_check(net: Network, x: np.ndarray, y: np.ndarray,
                            step: float = 1e-4, samples_per_block: int = 40,
                            seed: int = 0) -> dict[str, float]:
    """Relative error between analytic and central-difference gradients.

    For each parameter block a random subset of coordinates is probed with a
    two-sided step; the reported number is ||ga - gfd|| / max(||ga||, ||gfd||)
    over the probed coordinates.

    The loss is only piecewise differentiable: a probe whose two evaluations
    land on different sides of a rectifier kink or flip a pooling argmax has
    no meaningful central difference. Probes compare the routing (masks and
    argmax choices) of the two perturbed passes and shrink the bracket until
    the routing is stable, so every probe differentiates one smooth piece;
    the shrink floor stays far above float64 cancellation noise. Coordinates
    that never stabilize are replaced with different ones.
    """
    rng = np.random.default_rng(seed)
    logits = net.forward(x)
    _, dlogits = softmax_cross_entropy(logits, y)
    net.backward(dlogits)
    analytic = {name: grad.copy() for name, _, grad in net.param_blocks()}

    errors: dict[str, float] = {}
    for name, param, _ in net.param_blocks():
        flat = param.reshape(-1)  # view; probes mutate the live parameter
        count = min(samples_per_block, flat.size)
        order = rng.permutation(flat.size)
        picked: list[int] = []
        fd: list[float] = []
        for i in order:
            if len(picked) == count:
                break
            saved = flat[i]
            h = step
            for _ in range(9):
                flat[i] = saved + h
                plus = net.loss(x, y)
                sig_plus = _routing_signature(net)
                flat[i] = saved - h
                minus = net.loss(x, y)
                sig_minus = _routing_signature(net)
                flat[i] = saved
                if all(np.array_equal(a, b) for a, b in zip(sig_plus, sig_minus)):
                    picked.append(int(i))
                    fd.append((plus - minus) / (2.0 * h))
                    break
                h /= 4.0
        if not picked:
            raise RuntimeError(f"no kink-free probe found for block {name}")
        ga = analytic[name].reshape(-1)[picked]
        fda = np.array(fd)
        denom = max(np.linalg.norm(ga), np.linalg.norm(fda), 1e-12)
        errors[name] = float(np.linalg.norm(ga - fda) / denom)
    return errors
