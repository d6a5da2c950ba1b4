"""Feedforward network: initialization, forward pass, backprop and SGD training.

Per-sample loss is ``(y - yhat)**2`` with no 1/2 factor, so the gradient
with respect to the output is ``-2 * (y - yhat)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernel import prepare, sgd_epoch
from .errors import (
    ConfigError,
    ModelFileError,
    NumericError,
    ShapeError,
    TrainingDivergedError,
)

HIDDEN_ACTIVATIONS = ("sigmoid", "tanh")
OUTPUT_ACTIVATIONS = ("linear", "sigmoid")
STOP_REASONS = ("tolerance", "patience", "max_epochs")
MIN_IMPROVEMENT = 1e-9


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


# Derivatives are written in terms of the activation output a = f(z).
_ACTIVATIONS = {
    "sigmoid": (_sigmoid, lambda a: a * (1.0 - a)),
    "tanh": (np.tanh, lambda a: 1.0 - a * a),
    "linear": (lambda z: z, lambda a: np.ones_like(a)),
}


@dataclass(frozen=True)
class NetworkConfig:
    layer_sizes: tuple = (18, 10, 1)
    hidden_activation: str = "sigmoid"
    output_activation: str = "linear"
    init_seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2:
            raise ConfigError("layer_sizes needs at least an input and an output layer")
        if any(s < 1 for s in sizes):
            raise ConfigError(f"layer sizes must be >= 1: {sizes}")
        if sizes[-1] != 1:
            raise ConfigError("output layer must have exactly one unit")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(f"hidden_activation must be one of {HIDDEN_ACTIVATIONS}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ConfigError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
        if not self.init_scale >= 0:
            raise ConfigError("init_scale must be non-negative")

    @property
    def n_inputs(self):
        return self.layer_sizes[0]

    def with_inputs(self, n_inputs):
        return replace(self, layer_sizes=(n_inputs,) + self.layer_sizes[1:])


@dataclass
class Network:
    weights: list
    biases: list
    config: NetworkConfig

    def __post_init__(self):
        sizes = self.config.layer_sizes
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ShapeError("parameter count does not match layer_sizes")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[i + 1], sizes[i]) or b.shape != (sizes[i + 1],):
                raise ShapeError(f"layer {i} parameters have the wrong shape")

    def copy(self):
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases], self.config)

    def activation_names(self):
        n_layers = len(self.weights)
        return [
            self.config.output_activation if i == n_layers - 1 else self.config.hidden_activation
            for i in range(n_layers)
        ]

    def parameters(self):
        """Flat list of parameter arrays: w0, b0, w1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def equals(self, other):
        return self.config == other.config and all(
            np.array_equal(a, b) for a, b in zip(self.parameters(), other.parameters())
        )


def init_network(cfg):
    """Seeded uniform init on +-init_scale/sqrt(fan_in); biases start at zero."""
    rng = np.random.default_rng(cfg.init_seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(cfg.layer_sizes[:-1], cfg.layer_sizes[1:]):
        bound = cfg.init_scale / math.sqrt(fan_in)
        weights.append(rng.uniform(-1.0, 1.0, size=(fan_out, fan_in)) * bound)
        biases.append(np.zeros(fan_out))
    return Network(weights, biases, cfg)


def _check_input(net, x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != net.config.n_inputs:
        raise ShapeError(
            f"expected a feature vector of length {net.config.n_inputs}, got shape {x.shape}"
        )
    return x


def forward(net, x):
    """Return ``(output, activations)``; activations[0] is the input itself."""
    a = _check_input(net, x)
    activations = [a]
    for w, b, name in zip(net.weights, net.biases, net.activation_names()):
        a = _ACTIVATIONS[name][0](w @ a + b)
        activations.append(a)
    return float(a[0]), activations


def predict(net, x):
    return forward(net, x)[0]


def predict_many(net, features):
    """Batch predictions for a 2-D feature array."""
    a = np.asarray(features, dtype=float)
    if a.ndim != 2 or a.shape[1] != net.config.n_inputs:
        raise ShapeError(
            f"expected features of shape (n, {net.config.n_inputs}), got {a.shape}"
        )
    for w, b, name in zip(net.weights, net.biases, net.activation_names()):
        a = _ACTIVATIONS[name][0](a @ w.T + b)
    return a[:, 0]


def loss(net, x, y):
    d = y - predict(net, x)
    return d * d


def _backprop(net, activations, y):
    names = net.activation_names()
    yhat = activations[-1][0]
    delta = np.array([-2.0 * (y - yhat)]) * _ACTIVATIONS[names[-1]][1](activations[-1])
    gw = [None] * len(net.weights)
    gb = [None] * len(net.weights)
    for i in range(len(net.weights) - 1, -1, -1):
        gw[i] = np.outer(delta, activations[i])
        gb[i] = delta
        if i:
            delta = (net.weights[i].T @ delta) * _ACTIVATIONS[names[i - 1]][1](activations[i])
    return gw, gb


def compute_gradients(net, x, y):
    """Gradients of ``(y - yhat)**2`` as ``(weight_grads, bias_grads)``."""
    _, activations = forward(net, x)
    gw, gb = _backprop(net, activations, float(y))
    if not all(np.all(np.isfinite(g)) for g in gw + gb):
        raise NumericError("non-finite value encountered during backpropagation")
    return gw, gb


def finite_diff_gradient(net, x, y, step=1e-5):
    """Central-difference gradients; an independent check on backprop."""
    if not step > 0:
        raise ValueError("step must be positive")
    probe = net.copy()
    grads = []
    for p in probe.parameters():
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + step
            up = loss(probe, x, y)
            p[idx] = orig - step
            down = loss(probe, x, y)
            p[idx] = orig
            g[idx] = (up - down) / (2.0 * step)
        grads.append(g)
    return grads[0::2], grads[1::2]


# -- training -----------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    max_epochs: int = 2000
    mse_tolerance: float = 1e-7
    patience: int = 50
    shuffle_seed: int = 0

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ConfigError("learning_rate must be non-negative")
        if int(self.max_epochs) < 1:
            raise ConfigError("max_epochs must be >= 1")
        if not self.mse_tolerance >= 0:
            raise ConfigError("mse_tolerance must be >= 0")
        if int(self.patience) < 1:
            raise ConfigError("patience must be >= 1")


@dataclass
class TrainReport:
    epochs_run: int
    epoch_mse: list = field(default_factory=list)
    stop_reason: str = "max_epochs"

    def to_csv(self):
        lines = ["epoch,mse"]
        lines += [f"{i},{v:.17g}" for i, v in enumerate(self.epoch_mse, start=1)]
        return "\n".join(lines) + "\n"


def training_mse(net, features, targets):
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.asarray(targets, dtype=float) - predict_many(net, features)
        return float(np.mean(d * d))


def _as_arrays(samples):
    if hasattr(samples, "features") and hasattr(samples, "targets"):
        return np.asarray(samples.features, dtype=float), np.asarray(samples.targets, dtype=float)
    samples = list(samples)
    return (
        np.array([s.features for s in samples], dtype=float),
        np.array([s.target for s in samples], dtype=float),
    )


def train(net, samples, tc):
    """Per-sample gradient descent over seeded shuffles of the training set.

    Stops when the epoch-end training MSE is <= ``tc.mse_tolerance``, when it
    has improved by less than 1e-9 for ``tc.patience`` epochs in a row, or
    after ``tc.max_epochs``.  ``net`` is not modified.
    """
    x, y = _as_arrays(samples)
    if len(y) == 0:
        raise ValueError("no training samples")
    if x.ndim != 2 or x.shape[1] != net.config.n_inputs:
        raise ShapeError(
            f"samples have {x.shape[-1] if x.ndim == 2 else '?'} features,"
            f" network expects {net.config.n_inputs}"
        )
    net = net.copy()
    rng = np.random.default_rng(tc.shuffle_seed)
    typed_w, typed_b, codes = prepare(net.weights, net.biases, net.activation_names())
    x = np.ascontiguousarray(x)
    lr = float(tc.learning_rate)

    report = TrainReport(0)
    prev = training_mse(net, x, y)
    stale = 0
    for epoch in range(1, tc.max_epochs + 1):
        sgd_epoch(typed_w, typed_b, codes, x, y, rng.permutation(len(y)), lr)
        current = training_mse(net, x, y)
        if not math.isfinite(current):
            raise TrainingDivergedError(epoch)
        report.epoch_mse.append(current)
        report.epochs_run = epoch
        if current <= tc.mse_tolerance:
            report.stop_reason = "tolerance"
            break
        stale = stale + 1 if prev - current < MIN_IMPROVEMENT else 0
        prev = current
        if stale >= tc.patience:
            report.stop_reason = "patience"
            break
    else:
        report.stop_reason = "max_epochs"
    return net, report


# -- model file -----------------------------------------------------------------

MODEL_HEADER = "enercast-model v1"


def _fmt(v):
    return format(float(v), ".17g")


def dumps_model(net, extra=None):
    """Serialize a network (plus optional ``key=value`` metadata) to text."""
    cfg = net.config
    lines = [
        MODEL_HEADER,
        "layer_sizes=" + ",".join(str(s) for s in cfg.layer_sizes),
        f"hidden_activation={cfg.hidden_activation}",
        f"output_activation={cfg.output_activation}",
        f"init_seed={cfg.init_seed}",
        f"init_scale={_fmt(cfg.init_scale)}",
    ]
    for key, value in (extra or {}).items():
        if isinstance(value, (tuple, list)):
            value = ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = _fmt(value)
        lines.append(f"{key}={value}")
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        lines.append(f"layer {i}")
        lines += ["w " + ",".join(_fmt(v) for v in row) for row in w]
        lines.append("b " + ",".join(_fmt(v) for v in b))
    return "\n".join(lines) + "\n"


def loads_model(text):
    """Inverse of ``dumps_model``; returns ``(network, extra)``.

    ``extra`` maps the non-network ``key=value`` lines to their raw strings.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != MODEL_HEADER:
        raise ModelFileError(f"not a model file (expected header {MODEL_HEADER!r})")
    meta = {}
    layers = []
    try:
        for raw in lines[1:]:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("layer "):
                layers.append(([], None))
            elif line.startswith("w "):
                layers[-1][0].append([float(v) for v in line[2:].split(",")])
            elif line.startswith("b "):
                layers[-1] = (layers[-1][0], [float(v) for v in line[2:].split(",")])
            elif "=" in line and not layers:
                key, value = line.split("=", 1)
                meta[key] = value
            else:
                raise ModelFileError(f"unrecognized line {line!r}")
        cfg = NetworkConfig(
            layer_sizes=tuple(int(s) for s in meta.pop("layer_sizes").split(",")),
            hidden_activation=meta.pop("hidden_activation"),
            output_activation=meta.pop("output_activation"),
            init_seed=int(meta.pop("init_seed")),
            init_scale=float(meta.pop("init_scale")),
        )
        weights = [np.array(w, dtype=float) for w, _ in layers]
        biases = [np.array(b, dtype=float) for _, b in layers]
        net = Network(weights, biases, cfg)
    except (KeyError, ValueError, IndexError, TypeError, ShapeError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from exc
    if not all(np.all(np.isfinite(p)) for p in net.parameters()):
        raise ModelFileError("model file contains non-finite parameters")
    return net, meta


def save_model(path, net, extra=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(net, extra))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


__all__ = [
    "NetworkConfig", "Network", "TrainConfig", "TrainReport", "init_network", "forward",
    "predict", "predict_many", "compute_gradients", "finite_diff_gradient", "train",
    "training_mse", "dumps_model", "loads_model", "save_model", "load_model",
]
