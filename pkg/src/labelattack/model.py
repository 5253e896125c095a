"""Single-sigmoid-output binary classifiers with analytic BCE gradients.

Parameters live in one flat vector. Layouts:

    logistic: w[d], b
    mlp:      W1[d, h] (row-major), b1[h], w2[h], b2     (tanh hidden layer)
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .core import RngStream, ValidationError

BCE_CLAMP = 1e-12
_P_MIN = np.nextafter(0.0, 1.0)
_P_MAX = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class ModelSpec:
    kind: Literal["logistic", "mlp"] = "logistic"
    n_features: int = 16
    hidden_units: int = 32
    init_scale: float | None = None  # None -> Glorot uniform bound per layer

    def __post_init__(self):
        if self.kind not in ("logistic", "mlp"):
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if self.n_features < 1:
            raise ValidationError("n_features must be at least 1")
        if self.kind == "mlp" and self.hidden_units < 1:
            raise ValidationError("mlp needs at least one hidden unit")

    @property
    def n_params(self) -> int:
        d, h = self.n_features, self.hidden_units
        if self.kind == "logistic":
            return d + 1
        return d * h + h + h + 1


@dataclass(frozen=True)
class ModelState:
    spec: ModelSpec
    parameters: np.ndarray

    def __post_init__(self):
        if self.parameters.shape != (self.spec.n_params,):
            raise ValidationError(f"expected {self.spec.n_params} parameters, got {self.parameters.shape}")

    def __eq__(self, other):
        return (
            isinstance(other, ModelState)
            and self.spec == other.spec
            and np.array_equal(self.parameters, other.parameters)
        )

    def copy(self) -> "ModelState":
        return ModelState(self.spec, self.parameters.copy())


def _unpack(spec: ModelSpec, theta: np.ndarray):
    d, h = spec.n_features, spec.hidden_units
    if spec.kind == "logistic":
        return theta[:d], theta[d]
    W1 = theta[: d * h].reshape(d, h)
    b1 = theta[d * h : d * h + h]
    w2 = theta[d * h + h : d * h + 2 * h]
    return W1, b1, w2, theta[-1]


def init_model(spec: ModelSpec, rng: RngStream) -> ModelState:
    gen = rng.generator()

    def bound(fan_in, fan_out):
        return spec.init_scale if spec.init_scale is not None else np.sqrt(6.0 / (fan_in + fan_out))

    d, h = spec.n_features, spec.hidden_units
    theta = np.zeros(spec.n_params)
    if spec.kind == "logistic":
        a = bound(d, 1)
        theta[:d] = gen.uniform(-a, a, d)
    else:
        a1, a2 = bound(d, h), bound(h, 1)
        theta[: d * h] = gen.uniform(-a1, a1, d * h)
        theta[d * h + h : d * h + 2 * h] = gen.uniform(-a2, a2, h)
    return ModelState(spec, theta)


def _check_batch(model: ModelState, batch: np.ndarray) -> np.ndarray:
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.spec.n_features:
        raise ValidationError(f"batch shape {x.shape} does not match n_features={model.spec.n_features}")
    return x


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logits(model: ModelState, x: np.ndarray):
    if model.spec.kind == "logistic":
        w, b = _unpack(model.spec, model.parameters)
        return x @ w + b, None
    W1, b1, w2, b2 = _unpack(model.spec, model.parameters)
    hidden = np.tanh(x @ W1 + b1)
    return hidden @ w2 + b2, hidden


def forward(model: ModelState, batch: np.ndarray) -> np.ndarray:
    x = _check_batch(model, batch)
    z, _ = _logits(model, x)
    # keep outputs strictly inside (0, 1) even for saturated logits
    return np.clip(_sigmoid(z), _P_MIN, _P_MAX)


def bce_loss(probabilities: np.ndarray, labels: np.ndarray) -> float:
    p = np.asarray(probabilities, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.shape != y.shape:
        raise ValidationError(f"length mismatch: {p.shape} vs {y.shape}")
    if p.size == 0:
        raise ValidationError("bce_loss of an empty batch")
    p = np.clip(p, BCE_CLAMP, 1.0 - BCE_CLAMP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def loss_and_gradient(model: ModelState, batch: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean BCE and its gradient in one pass.

    The gradient is that of the unclamped loss; the two differ only where
    predicted probabilities fall within 1e-12 of 0 or 1.
    """
    x = _check_batch(model, batch)
    y = np.asarray(labels, dtype=np.float64)
    if y.shape != (x.shape[0],):
        raise ValidationError(f"{x.shape[0]} rows but {y.shape} labels")
    if x.shape[0] == 0:
        raise ValidationError("empty batch")
    z, hidden = _logits(model, x)
    p = _sigmoid(z)
    loss = bce_loss(np.clip(p, _P_MIN, _P_MAX), y)
    dz = (p - y) / x.shape[0]

    spec = model.spec
    if spec.kind == "logistic":
        return loss, np.concatenate([x.T @ dz, [dz.sum()]])
    _, _, w2, _ = _unpack(spec, model.parameters)
    dpre = np.outer(dz, w2) * (1.0 - hidden**2)
    return loss, np.concatenate([(x.T @ dpre).ravel(), dpre.sum(axis=0), hidden.T @ dz, [dz.sum()]])


def backward(model: ModelState, batch: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of mean BCE with respect to the flat parameter vector."""
    return loss_and_gradient(model, batch, labels)[1]


def save_checkpoint(model: ModelState, path: str | os.PathLike) -> None:
    """Text checkpoint: one JSON header line with the ModelSpec, then one parameter per line."""
    with open(path, "w") as fh:
        fh.write(json.dumps(asdict(model.spec), sort_keys=True) + "\n")
        fh.writelines(repr(float(v)) + "\n" for v in model.parameters)


def load_checkpoint(path: str | os.PathLike) -> ModelState:
    with open(path) as fh:
        spec = ModelSpec(**json.loads(fh.readline()))
        values = [float(line) for line in fh if line.strip()]
    return ModelState(spec, np.array(values, dtype=np.float64))
