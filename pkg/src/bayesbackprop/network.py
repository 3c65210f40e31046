"""Deterministic feedforward network over a flat weight vector.

The whole parameter set (weights and biases of every layer) lives in one
flat float64 vector so that the posterior, prior, pruning, and checkpoint
code can treat it uniformly. ``WeightLayout`` maps (layer, row, col) to flat
indices; matrices are row-major views into the flat vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .mathops import gaussian_log_density
from .rng import Rng

CATEGORICAL = "categorical"
REGRESSION = "regression"


@dataclass(frozen=True)
class NetworkSpec:
    """MLP architecture: layer sizes, ReLU hidden units, and output head."""

    layer_sizes: tuple[int, ...]
    head: str = CATEGORICAL
    noise_sigma: float = 1.0  # regression head only

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(s) for s in self.layer_sizes))
        if len(self.layer_sizes) < 3:
            raise ValueError("need at least input, one hidden, and output sizes")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("all layer sizes must be >= 1")
        if self.head not in (CATEGORICAL, REGRESSION):
            raise ValueError(f"unknown head {self.head!r}")
        if self.head == REGRESSION and not self.noise_sigma > 0.0:
            raise ValueError("regression noise_sigma must be > 0")

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def weight_count(self) -> int:
        return sum(
            (fi + 1) * fo for fi, fo in zip(self.layer_sizes[:-1], self.layer_sizes[1:])
        )


class WeightLayout:
    """Flat-vector layout table for an MLP's weights and biases.

    Per layer the weight block (fan_in x fan_out, row-major) comes first,
    followed by the bias block (fan_out). ``flat_index(layer, i, j)`` uses
    i in 0..fan_in, where i == fan_in addresses bias j.
    """

    def __init__(self, spec: NetworkSpec):
        self.spec = spec
        self.weight_slices: list[slice] = []
        self.bias_slices: list[slice] = []
        self.shapes: list[tuple[int, int]] = []
        offset = 0
        for fan_in, fan_out in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:]):
            self.shapes.append((fan_in, fan_out))
            self.weight_slices.append(slice(offset, offset + fan_in * fan_out))
            offset += fan_in * fan_out
            self.bias_slices.append(slice(offset, offset + fan_out))
            offset += fan_out
        self.size = offset

    @property
    def n_layers(self) -> int:
        return len(self.shapes)

    def flat_index(self, layer: int, i: int, j: int) -> int:
        fan_in, fan_out = self.shapes[layer]
        if not (0 <= i <= fan_in and 0 <= j < fan_out):
            raise IndexError(f"(layer={layer}, i={i}, j={j}) outside layout")
        if i == fan_in:
            return self.bias_slices[layer].start + j
        return self.weight_slices[layer].start + i * fan_out + j

    def unpack(self, w: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Views (W, b) per layer into the flat vector; no copying."""
        if w.shape != (self.size,):
            raise ValueError(f"expected flat vector of length {self.size}, got {w.shape}")
        out = []
        for (fan_in, fan_out), ws, bs in zip(self.shapes, self.weight_slices, self.bias_slices):
            out.append((w[ws].reshape(fan_in, fan_out), w[bs]))
        return out

    def bias_mask(self) -> np.ndarray:
        """Boolean vector marking bias positions."""
        mask = np.zeros(self.size, dtype=bool)
        for bs in self.bias_slices:
            mask[bs] = True
        return mask


def glorot_uniform_weights(layout: WeightLayout, rng: Rng) -> np.ndarray:
    """Fan-based uniform init, U(+-sqrt(6/(fan_in+fan_out))) per layer block."""
    w = np.zeros(layout.size)
    for (fan_in, fan_out), ws, bs in zip(
        layout.shapes, layout.weight_slices, layout.bias_slices
    ):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w[ws] = rng.uniform(-bound, bound, fan_in * fan_out)
        w[bs] = rng.uniform(-bound, bound, fan_out)
    return w


@dataclass
class ForwardCache:
    """Activations retained by forward() so backward() can run."""

    x: np.ndarray
    hidden: list[np.ndarray]            # post-ReLU (and post-dropout) activations
    relu_masks: list[np.ndarray]        # preactivation > 0, per hidden layer
    dropout_masks: list[np.ndarray] | None
    output: np.ndarray                  # final linear layer output
    w_id: int                           # identity check: backward must see same weights


@dataclass
class Prediction:
    """Network output: normalized per-class log-probs, or per-output means."""

    head: str
    log_probs: np.ndarray | None = None
    means: np.ndarray | None = None
    cache: ForwardCache | None = field(default=None, repr=False)

    @property
    def batch_size(self) -> int:
        arr = self.log_probs if self.head == CATEGORICAL else self.means
        return arr.shape[0]


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))


def forward(
    spec: NetworkSpec,
    w: np.ndarray,
    x: np.ndarray,
    dropout_masks: list[np.ndarray] | None = None,
) -> Prediction:
    """ReLU MLP forward pass on a (batch x input) matrix.

    Returns a Prediction whose cache holds everything backward() needs.
    Optional dropout_masks (one per hidden layer, already inverted-scaled)
    multiply the hidden activations.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != spec.input_size:
        raise ValueError(f"input must be (batch, {spec.input_size}), got {x.shape}")
    layout = WeightLayout(spec)
    layers = layout.unpack(np.asarray(w, dtype=np.float64))

    a = x
    hidden: list[np.ndarray] = []
    relu_masks: list[np.ndarray] = []
    for li, (W, b) in enumerate(layers[:-1]):
        z = a @ W + b
        mask = z > 0.0
        a = np.where(mask, z, 0.0)
        if dropout_masks is not None:
            a = a * dropout_masks[li]
        relu_masks.append(mask)
        hidden.append(a)
    W_out, b_out = layers[-1]
    out = a @ W_out + b_out

    cache = ForwardCache(
        x=x,
        hidden=hidden,
        relu_masks=relu_masks,
        dropout_masks=dropout_masks,
        output=out,
        w_id=id(w),
    )
    if spec.head == CATEGORICAL:
        return Prediction(head=CATEGORICAL, log_probs=log_softmax(out), cache=cache)
    return Prediction(head=REGRESSION, means=out, cache=cache)


def dropout_forward(
    spec: NetworkSpec,
    w: np.ndarray,
    x: np.ndarray,
    drop_prob: float,
    rng: Rng,
    train: bool = True,
) -> Prediction:
    """Forward pass with Bernoulli(1-p) masks on hidden units, scaled 1/(1-p).

    At test time (train=False) no units are masked. Inputs are never dropped.
    """
    if not 0.0 <= drop_prob < 1.0:
        raise ValueError("drop_prob must lie in [0, 1)")
    if not train or drop_prob == 0.0:
        return forward(spec, w, x)
    keep = 1.0 - drop_prob
    batch = np.asarray(x).shape[0]
    masks = [
        (rng.random((batch, size)) < keep).astype(np.float64) / keep
        for size in spec.layer_sizes[1:-1]
    ]
    return forward(spec, w, x, dropout_masks=masks)


def log_likelihood(pred: Prediction, y: np.ndarray, noise_sigma: float | None = None) -> float:
    """Sum over the batch of per-example log-likelihoods.

    Categorical: log-prob of the true class. Regression: Gaussian density of
    the target around the predicted mean with the head's noise scale.
    """
    if pred.head == CATEGORICAL:
        y = np.asarray(y)
        n, k = pred.log_probs.shape
        if y.shape != (n,):
            raise ValueError(f"labels must be shape ({n},), got {y.shape}")
        if np.any(y < 0) or np.any(y >= k):
            raise ValueError("label out of range")
        return float(np.sum(pred.log_probs[np.arange(n), y.astype(np.intp)]))
    y = np.asarray(y, dtype=np.float64)
    means = pred.means
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if y.shape != means.shape:
        raise ValueError(f"targets must be shape {means.shape}, got {y.shape}")
    sigma = float(noise_sigma) if noise_sigma is not None else 1.0
    return float(np.sum(gaussian_log_density(y, means, sigma)))


def backward(spec: NetworkSpec, w: np.ndarray, pred: Prediction, y: np.ndarray) -> np.ndarray:
    """Exact gradient of -log P(D|w) with respect to the flat weight vector.

    Requires the Prediction returned by forward() on the same weights and
    inputs; the gradient is summed over the batch.
    """
    cache = pred.cache
    if cache is None:
        raise ValueError("backward() needs a Prediction produced by forward()")
    if cache.w_id != id(w):
        raise ValueError("backward() called with different weights than forward()")
    layout = WeightLayout(spec)
    layers = layout.unpack(np.asarray(w, dtype=np.float64))
    grad = np.zeros(layout.size)
    grads = layout.unpack(grad)

    if spec.head == CATEGORICAL:
        y = np.asarray(y).astype(np.intp)
        n = pred.log_probs.shape[0]
        delta = np.exp(pred.log_probs)
        delta[np.arange(n), y] -= 1.0
    else:
        y = np.asarray(y, dtype=np.float64)
        if y.ndim == 1:
            y = y.reshape(-1, 1)
        delta = (cache.output - y) / (spec.noise_sigma**2)

    # Walk the layers backwards; delta is d(-loglik)/d(preactivation).
    for li in range(layout.n_layers - 1, -1, -1):
        a_prev = cache.x if li == 0 else cache.hidden[li - 1]
        gW, gb = grads[li]
        gW += a_prev.T @ delta
        gb += delta.sum(axis=0)
        if li > 0:
            W, _ = layers[li]
            delta = delta @ W.T
            if cache.dropout_masks is not None:
                delta = delta * cache.dropout_masks[li - 1]
            delta = delta * cache.relu_masks[li - 1]
    return grad
