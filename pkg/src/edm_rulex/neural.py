"""One-hidden-layer feed-forward network with logistic units.

Trained by per-pattern gradient descent with momentum against one-hot
targets.  A trained network is immutable in practice (nothing mutates it
outside train) and its per-class output activation is the fitness surface
the genetic search climbs.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import NumericError, ValidationError
from .schema import AttributeSchema, EncodedVector

log = logging.getLogger(__name__)


def sigmoid(u):
    return 1.0 / (1.0 + np.exp(-np.clip(u, -500.0, 500.0)))


@dataclass
class TrainConfig:
    learning_rate: float = 0.2
    momentum: float = 0.9
    max_epochs: int = 5000
    target_mse: float = 0.01
    hidden_size: int | None = None  # default 2 * ceil(sqrt(input_size))
    init_scale: float = 0.5  # weights uniform in +-init_scale/sqrt(fan_in)
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError(f"learning rate must be > 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValidationError(f"momentum must be in [0,1), got {self.momentum}")
        if self.max_epochs < 1:
            raise ValidationError(f"max epochs must be >= 1, got {self.max_epochs}")
        if self.target_mse <= 0:
            raise ValidationError(f"target mse must be > 0, got {self.target_mse}")

    def resolve_hidden(self, input_size: int) -> int:
        if self.hidden_size is not None:
            return self.hidden_size
        return 2 * math.ceil(math.sqrt(input_size))


@dataclass
class Network:
    """Weights and biases; logistic activation on both layers.

    v: (hidden, input) input-to-hidden weights, b_h: hidden biases,
    w: (output, hidden) hidden-to-output weights, b_o: output biases.
    """

    v: np.ndarray
    b_h: np.ndarray
    w: np.ndarray
    b_o: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def input_size(self) -> int:
        return self.v.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.v.shape[0]

    @property
    def output_size(self) -> int:
        return self.w.shape[0]

    def __post_init__(self):
        if self.v.shape[0] != self.b_h.shape[0] or self.w.shape[1] != self.v.shape[0]:
            raise ValidationError("inconsistent layer shapes")
        if self.w.shape[0] != self.b_o.shape[0]:
            raise ValidationError("inconsistent output shapes")
        for arr in (self.v, self.b_h, self.w, self.b_o):
            if not np.all(np.isfinite(arr)):
                raise ValidationError("network weights must be finite")


@dataclass
class TrainResult:
    network: Network
    mse_history: list[float]
    epochs_run: int

    @property
    def final_mse(self) -> float:
        return self.mse_history[-1]


def init_network(schema: AttributeSchema, config: TrainConfig) -> Network:
    """Fresh network sized by the schema, seeded uniform init."""
    input_size = schema.total_predictive_bits
    output_size = schema.target_bits
    hidden = config.resolve_hidden(input_size)
    rng = np.random.default_rng(config.seed)
    r_v = config.init_scale / math.sqrt(input_size)
    r_w = config.init_scale / math.sqrt(hidden)
    return Network(
        v=rng.uniform(-r_v, r_v, size=(hidden, input_size)),
        b_h=rng.uniform(-r_v, r_v, size=hidden),
        w=rng.uniform(-r_w, r_w, size=(output_size, hidden)),
        b_o=rng.uniform(-r_w, r_w, size=output_size),
    )


def _as_input(net: Network, bits) -> np.ndarray:
    x = np.asarray(bits, dtype=float).ravel()
    if x.shape != (net.input_size,):
        raise ValidationError(
            f"input length {x.shape[0]} does not match network input size {net.input_size}"
        )
    return x


def forward(net: Network, bits) -> np.ndarray:
    """Output activations for one bit string; every component in (0,1)."""
    x = _as_input(net, bits)
    h = sigmoid(net.v @ x + net.b_h)
    return sigmoid(net.w @ h + net.b_o)


def class_score(net: Network, chromosome, class_index: int) -> float:
    """The output activation of one class node; pure, safe to call concurrently."""
    if not 0 <= class_index < net.output_size:
        raise ValidationError(
            f"class index {class_index} out of range for {net.output_size} outputs"
        )
    return float(forward(net, chromosome)[class_index])


def _targets(net: Network, dataset: Sequence[EncodedVector]) -> tuple[np.ndarray, np.ndarray]:
    x = np.stack([np.asarray(v.bits, dtype=float) for v in dataset])
    if x.shape[1] != net.input_size:
        raise ValidationError(
            f"dataset encoded with {x.shape[1]} bits, network expects {net.input_size}"
        )
    t = np.zeros((len(dataset), net.output_size))
    for i, v in enumerate(dataset):
        if not 0 <= v.target_index < net.output_size:
            raise ValidationError(f"target index {v.target_index} out of range")
        t[i, v.target_index] = 1.0
    return x, t


def dataset_mse(net: Network, dataset: Sequence[EncodedVector]) -> float:
    """Mean squared output error over all patterns and output units."""
    x, t = _targets(net, dataset)
    h = sigmoid(x @ net.v.T + net.b_h)
    y = sigmoid(h @ net.w.T + net.b_o)
    return float(np.mean((y - t) ** 2))


def loss_and_gradients(net: Network, dataset: Sequence[EncodedVector]):
    """Mean half-squared error over the dataset and its analytic gradients.

    Returns (loss, {"v": dV, "b_h": ..., "w": ..., "b_o": ...}) averaged over
    patterns, matching what finite differences of the same loss give.
    """
    x, t = _targets(net, dataset)
    n = x.shape[0]
    h = sigmoid(x @ net.v.T + net.b_h)
    y = sigmoid(h @ net.w.T + net.b_o)
    e = y - t
    loss = float(0.5 * np.sum(e**2) / n)
    d_o = e * y * (1 - y)
    d_h = (d_o @ net.w) * h * (1 - h)
    grads = {
        "w": d_o.T @ h / n,
        "b_o": d_o.sum(axis=0) / n,
        "v": d_h.T @ x / n,
        "b_h": d_h.sum(axis=0) / n,
    }
    return loss, grads


def train(net: Network, dataset: Sequence[EncodedVector], config: TrainConfig) -> TrainResult:
    """Per-pattern gradient descent with momentum until the mse target or the
    epoch budget.

    Pattern order is reshuffled once per epoch from the seeded generator, so
    training is deterministic for a fixed config.  The mse history records the
    full-dataset mse after each epoch; only the final value is a contract.
    """
    if len(dataset) == 0:
        raise ValidationError("cannot train on an empty dataset")
    x, t = _targets(net, dataset)
    rng = np.random.default_rng(config.seed)
    lr, mom = config.learning_rate, config.momentum
    vel = {
        "v": np.zeros_like(net.v),
        "b_h": np.zeros_like(net.b_h),
        "w": np.zeros_like(net.w),
        "b_o": np.zeros_like(net.b_o),
    }
    history: list[float] = []
    epochs_run = 0
    for epoch in range(config.max_epochs):
        order = rng.permutation(len(dataset))
        for i in order:
            xi, ti = x[i], t[i]
            h = sigmoid(net.v @ xi + net.b_h)
            y = sigmoid(net.w @ h + net.b_o)
            d_o = (y - ti) * y * (1 - y)
            d_h = (net.w.T @ d_o) * h * (1 - h)
            for name, grad in (
                ("w", np.outer(d_o, h)),
                ("b_o", d_o),
                ("v", np.outer(d_h, xi)),
                ("b_h", d_h),
            ):
                vel[name] = mom * vel[name] - lr * grad
            net.w += vel["w"]
            net.b_o += vel["b_o"]
            net.v += vel["v"]
            net.b_h += vel["b_h"]
        mse = dataset_mse(net, dataset)
        if not np.isfinite(mse):
            raise NumericError(
                f"training diverged at epoch {epoch + 1} (non-finite loss); "
                "try a smaller learning rate"
            )
        history.append(mse)
        epochs_run = epoch + 1
        if mse <= config.target_mse:
            break
    log.info("trained %d epochs, final mse %.5f", epochs_run, history[-1])
    return TrainResult(network=net, mse_history=history, epochs_run=epochs_run)


def network_to_dict(net: Network) -> dict:
    return {
        "input_size": net.input_size,
        "hidden_size": net.hidden_size,
        "output_size": net.output_size,
        "v": net.v.tolist(),
        "b_h": net.b_h.tolist(),
        "w": net.w.tolist(),
        "b_o": net.b_o.tolist(),
        "metadata": net.metadata,
    }


def network_from_dict(doc: Mapping) -> Network:
    net = Network(
        v=np.asarray(doc["v"], dtype=float),
        b_h=np.asarray(doc["b_h"], dtype=float),
        w=np.asarray(doc["w"], dtype=float),
        b_o=np.asarray(doc["b_o"], dtype=float),
        metadata=dict(doc.get("metadata", {})),
    )
    declared = (doc.get("input_size"), doc.get("hidden_size"), doc.get("output_size"))
    actual = (net.input_size, net.hidden_size, net.output_size)
    if tuple(d for d in declared if d is not None) and declared != actual:
        raise ValidationError(f"declared sizes {declared} do not match arrays {actual}")
    return net


def save_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(network_to_dict(net), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_network(path: str | Path) -> Network:
    return network_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
