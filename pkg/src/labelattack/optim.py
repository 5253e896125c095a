"""Adam with bias correction, and patience-based early stopping."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .core import TrainingError, ValidationError
from .model import ModelState


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValidationError("betas must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")


@dataclass(frozen=True)
class OptimizerState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "OptimizerState":
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(
    params: np.ndarray, opt_state: OptimizerState, gradients: np.ndarray, config: OptimizerConfig
) -> tuple[np.ndarray, OptimizerState]:
    g = np.asarray(gradients, dtype=np.float64)
    if g.shape != params.shape or opt_state.m.shape != params.shape:
        raise ValidationError("parameter, gradient and moment vectors must share one shape")
    if not np.all(np.isfinite(g)):
        bad = np.flatnonzero(~np.isfinite(g))
        raise TrainingError(f"non-finite gradient at step {opt_state.t + 1}, coordinates {bad[:10].tolist()}")

    t = opt_state.t + 1
    m = config.beta1 * opt_state.m + (1.0 - config.beta1) * g
    v = config.beta2 * opt_state.v + (1.0 - config.beta2) * g * g
    m_hat = m / (1.0 - config.beta1**t)
    v_hat = v / (1.0 - config.beta2**t)
    new_params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return new_params, OptimizerState(m, v, t)


Decision = Literal["continue", "stop"]


@dataclass(frozen=True)
class EarlyStopState:
    patience: int = 8
    max_epochs: int = 100
    best_metric: float = -math.inf
    best_epoch: int = 0
    best_checkpoint: ModelState | None = None
    epochs_since_improvement: int = 0

    def __post_init__(self):
        if self.patience < 1 or self.max_epochs < 1:
            raise ValidationError("patience and max_epochs must be at least 1")


def early_stop_update(
    state: EarlyStopState, epoch: int, val_metric: float, checkpoint: ModelState | None
) -> tuple[EarlyStopState, Decision]:
    """Advance the patience counter after ``epoch`` (1-based).

    Only a strictly larger metric counts as an improvement. On ``"stop"`` the
    caller restores ``best_checkpoint``.
    """
    if epoch <= state.best_epoch:
        raise ValidationError(f"epochs must increase: got {epoch} after best epoch {state.best_epoch}")
    if val_metric > state.best_metric:
        state = replace(
            state,
            best_metric=val_metric,
            best_epoch=epoch,
            best_checkpoint=checkpoint.copy() if checkpoint is not None else None,
            epochs_since_improvement=0,
        )
    else:
        state = replace(state, epochs_since_improvement=state.epochs_since_improvement + 1)
    if state.epochs_since_improvement >= state.patience or epoch >= state.max_epochs:
        return state, "stop"
    return state, "continue"
