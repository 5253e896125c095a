import math

import numpy as np
import pytest

from labelattack.core import TrainingError, ValidationError
from labelattack.model import ModelSpec, ModelState
from labelattack.optim import EarlyStopState, OptimizerConfig, OptimizerState, adam_step, early_stop_update


def scalar_adam(theta, grads, lr=1e-4, b1=0.9, b2=0.999, eps=1e-8):
    """Reference recurrence written independently, one plain float at a time."""
    m = v = 0.0
    out = []
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        theta = theta - lr * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
        out.append(theta)
    return out


def test_default_hyperparameters():
    c = OptimizerConfig()
    assert (c.learning_rate, c.beta1, c.beta2) == (1e-4, 0.9, 0.999)


@pytest.mark.parametrize("g", [1e-3, 0.5, -7.0, 1e4])
def test_first_step_magnitude_is_lr(g):
    cfg = OptimizerConfig()
    params = np.zeros(2)
    new, state = adam_step(params, OptimizerState.zeros(2), np.full(2, g), cfg)
    step = np.abs(new - params)
    expected = cfg.learning_rate * abs(g) / (abs(g) + cfg.epsilon)
    np.testing.assert_allclose(step, expected, rtol=1e-12)
    # within epsilon-relative of lr, independent of |g|
    np.testing.assert_allclose(step, cfg.learning_rate, rtol=cfg.epsilon / abs(g) + 1e-12)
    assert state.t == 1


def test_zero_gradient_first_step_is_noop():
    params = np.array([1.0, 2.0])
    new, _ = adam_step(params, OptimizerState.zeros(2), np.zeros(2), OptimizerConfig())
    np.testing.assert_array_equal(new, params)


def test_trajectory_matches_scalar_recurrence():
    grads = [0.5, -1.2, 3.0, 0.01, -0.7]
    expected = scalar_adam(0.25, grads)
    params, state = np.array([0.25]), OptimizerState.zeros(1)
    for g, want in zip(grads, expected):
        params, state = adam_step(params, state, np.array([g]), OptimizerConfig())
        assert abs(params[0] - want) <= 1e-12
    assert state.t == 5
    assert np.all(state.v >= 0)


def test_non_finite_gradient_aborts():
    with pytest.raises(TrainingError, match="non-finite"):
        adam_step(np.zeros(2), OptimizerState.zeros(2), np.array([1.0, np.nan]), OptimizerConfig())


def test_shape_mismatch():
    with pytest.raises(ValidationError):
        adam_step(np.zeros(2), OptimizerState.zeros(3), np.zeros(2), OptimizerConfig())


def test_config_validation():
    with pytest.raises(ValidationError):
        OptimizerConfig(learning_rate=0)
    with pytest.raises(ValidationError):
        OptimizerConfig(beta1=1.0)


def _checkpoint(value):
    return ModelState(ModelSpec("logistic", 1), np.array([value, 0.0]))


def run_stopper(metrics, patience=8, max_epochs=100):
    state = EarlyStopState(patience=patience, max_epochs=max_epochs)
    for epoch, metric in enumerate(metrics, start=1):
        state, decision = early_stop_update(state, epoch, metric, _checkpoint(float(epoch)))
        if decision == "stop":
            return state, epoch
    return state, None


def test_patience_stops_after_eight_stagnant_epochs():
    state, stopped = run_stopper([0.8] + [0.7] * 20)
    assert stopped == 9
    assert state.best_epoch == 1
    assert state.best_checkpoint.parameters[0] == 1.0


def test_increasing_metrics_run_to_max_epochs():
    state, stopped = run_stopper([i / 200 for i in range(1, 101)], max_epochs=100)
    assert stopped == 100
    assert state.best_epoch == 100


def test_ties_do_not_reset_patience():
    state, stopped = run_stopper([0.5, 0.6] + [0.6] * 10)
    assert stopped == 10
    assert state.best_epoch == 2


def test_counter_resets_on_improvement():
    metrics = [0.5] + [0.4] * 7 + [0.55] + [0.1] * 8
    state, stopped = run_stopper(metrics)
    assert state.best_epoch == 9
    assert stopped == 17


def test_checkpoint_snapshot_is_independent():
    ck = _checkpoint(1.0)
    state, _ = early_stop_update(EarlyStopState(), 1, 0.9, ck)
    ck.parameters[0] = 99.0
    assert state.best_checkpoint.parameters[0] == 1.0
