"""Network-family image classifier with an sklearn-style estimator API.

The estimator wraps the small convolutional network from :mod:`ambnet.cnn`
and fixes the label set to the four generator families. ``save_model`` /
``load_model`` give bit-exact round trips through a checksummed binary
container so trained models can be shipped and replayed.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .cnn import DEFAULT_ARCHITECTURE, TrainConfig, build_network, train_sgd
from .generators import FAMILIES
from .validation import validate_image_batch

MODEL_MAGIC = b"AMBM"
MODEL_VERSION = 1

_PREDICT_CHUNK = 64


class ModelFormatError(ValueError):
    """Raised when a model file is malformed, truncated, or corrupted."""


class AmbImageClassifier(BaseEstimator, ClassifierMixin):
    """Four-class network-family classifier over square binary images.

    Parameters mirror the training configuration; all are recorded verbatim
    so ``get_params`` round-trips. ``fit`` expects images of side
    ``input_side`` exactly (pad first) and labels drawn from
    ``("ER", "NCN", "WS", "BA")``.
    """

    def __init__(self, input_side: int = 100, architecture=DEFAULT_ARCHITECTURE,
                 epochs: int = 30, batch_size: int = 32, learning_rate: float = 0.01,
                 momentum: float = 0.9, decay_every: int = 10, decay_factor: float = 0.5,
                 target_loss: float | None = None, seed: int = 0):
        self.input_side = input_side
        self.architecture = architecture
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.decay_every = decay_every
        self.decay_factor = decay_factor
        self.target_loss = target_loss
        self.seed = seed

    def _train_config(self) -> TrainConfig:
        return TrainConfig(epochs=self.epochs, batch_size=self.batch_size,
                           learning_rate=self.learning_rate, momentum=self.momentum,
                           decay_every=self.decay_every, decay_factor=self.decay_factor,
                           target_loss=self.target_loss)

    def _encode_labels(self, y) -> np.ndarray:
        y = np.asarray(y)
        unknown = sorted(set(map(str, y)) - set(FAMILIES))
        if unknown:
            raise ValueError(f"unknown labels {unknown}; expected subset of {FAMILIES}")
        lookup = {label: i for i, label in enumerate(FAMILIES)}
        return np.array([lookup[str(label)] for label in y], dtype=np.int64)

    def fit(self, X, y) -> "AmbImageClassifier":
        X = validate_image_batch(X, side=self.input_side)
        y_idx = self._encode_labels(y)
        if len(X) != len(y_idx):
            raise ValueError(f"X has {len(X)} images but y has {len(y_idx)} labels")
        if len(X) == 0:
            raise ValueError("cannot fit on an empty dataset")
        init_ss, shuffle_ss = np.random.SeedSequence(self.seed).spawn(2)
        self.network_ = build_network(self._as_tuple_architecture(), self.input_side,
                                      np.random.default_rng(init_ss))
        self.loss_curve_ = train_sgd(self.network_, X[:, None, :, :], y_idx,
                                     self._train_config(), seed=shuffle_ss)
        self.classes_ = np.array(FAMILIES)
        return self

    def _as_tuple_architecture(self) -> tuple:
        return tuple(tuple(layer) for layer in self.architecture)

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "network_")
        X = validate_image_batch(X, side=self.input_side)
        out = np.empty((len(X), len(FAMILIES)))
        for start in range(0, len(X), _PREDICT_CHUNK):
            chunk = X[start:start + _PREDICT_CHUNK]
            out[start:start + len(chunk)] = self.network_.predict_proba(
                chunk[:, None, :, :])
        return out

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]


def _header_dict(clf: AmbImageClassifier) -> dict:
    params = clf.get_params()
    params["architecture"] = [list(layer) for layer in clf._as_tuple_architecture()]
    blocks = clf.network_.param_blocks()
    return {
        "params": params,
        "loss_curve": [float(v) for v in clf.loss_curve_],
        "blocks": [{"name": name, "shape": list(arr.shape)} for name, arr, _ in blocks],
    }


def save_model(clf: AmbImageClassifier, path: str) -> None:
    """Write a fitted classifier to a versioned, checksummed binary file."""
    check_is_fitted(clf, "network_")
    header = json.dumps(_header_dict(clf), sort_keys=True).encode()
    body = [MODEL_MAGIC, MODEL_VERSION.to_bytes(4, "little"),
            len(header).to_bytes(8, "little"), header]
    for _, arr, _ in clf.network_.param_blocks():
        body.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    payload = b"".join(body)
    with open(path, "wb") as fh:
        fh.write(payload)
        fh.write(hashlib.sha256(payload).digest())


def load_model(path: str) -> AmbImageClassifier:
    """Read a model file back into a fitted classifier; bit-exact weights."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MODEL_MAGIC) + 12 + 32:
        raise ModelFormatError("model file is truncated")
    payload, digest = data[:-32], data[-32:]
    if hashlib.sha256(payload).digest() != digest:
        raise ModelFormatError("model file checksum mismatch")
    if payload[:4] != MODEL_MAGIC:
        raise ModelFormatError(f"bad magic bytes {payload[:4]!r}")
    version = int.from_bytes(payload[4:8], "little")
    if version != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {version}")
    header_len = int.from_bytes(payload[8:16], "little")
    header_end = 16 + header_len
    if header_end > len(payload):
        raise ModelFormatError("model file is truncated")
    try:
        header = json.loads(payload[16:header_end].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"unreadable model header: {exc}") from exc

    params = dict(header["params"])
    params["architecture"] = tuple(tuple(layer) for layer in params["architecture"])
    clf = AmbImageClassifier(**params)
    clf.network_ = build_network(params["architecture"], clf.input_side,
                                 np.random.default_rng(0))
    offset = header_end
    blocks = clf.network_.param_blocks()
    if [b["name"] for b in header["blocks"]] != [name for name, _, _ in blocks]:
        raise ModelFormatError("model header does not match the declared architecture")
    for spec, (name, arr, _) in zip(header["blocks"], blocks):
        if list(arr.shape) != spec["shape"]:
            raise ModelFormatError(f"shape mismatch for block {name}")
        nbytes = arr.size * 8
        if offset + nbytes > len(payload):
            raise ModelFormatError("model file is truncated")
        arr[...] = np.frombuffer(payload[offset:offset + nbytes],
                                 dtype="<f8").reshape(arr.shape)
        offset += nbytes
    if offset != len(payload):
        raise ModelFormatError("trailing bytes after parameter blocks")
    clf.loss_curve_ = list(header["loss_curve"])
    clf.classes_ = np.array(FAMILIES)
    return clf
