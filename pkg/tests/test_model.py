import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelattack.core import Purpose, ValidationError, derive_stream
from labelattack.model import (
    ModelSpec,
    ModelState,
    backward,
    bce_loss,
    forward,
    init_model,
    load_checkpoint,
    save_checkpoint,
)


def central_difference(model, x, y, h=1e-5):
    """Independent gradient oracle: loss evaluated through forward/bce_loss only."""
    theta = model.parameters
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        f_up = bce_loss(forward(ModelState(model.spec, up), x), y)
        f_down = bce_loss(forward(ModelState(model.spec, down), x), y)
        grad[i] = (f_up - f_down) / (2 * h)
    return grad


def max_relative_error(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6)))


def test_parameter_counts():
    assert init_model(ModelSpec("logistic", 16), derive_stream(0, Purpose.INIT)).parameters.size == 17
    assert init_model(ModelSpec("mlp", 16, 32), derive_stream(0, Purpose.INIT)).parameters.size == 577


def test_init_deterministic_and_bounded():
    spec = ModelSpec("mlp", 16, 32)
    a = init_model(spec, derive_stream(3, Purpose.INIT))
    assert a == init_model(spec, derive_stream(3, Purpose.INIT))
    assert a != init_model(spec, derive_stream(4, Purpose.INIT))
    w1 = a.parameters[: 16 * 32]
    assert np.all(np.abs(w1) <= math.sqrt(6 / 48))
    assert np.all(a.parameters[16 * 32 : 16 * 32 + 32] == 0)
    assert a.parameters[-1] == 0


def test_init_scale_override():
    m = init_model(ModelSpec("logistic", 5, init_scale=0.01), derive_stream(0, Purpose.INIT))
    assert np.all(np.abs(m.parameters[:5]) <= 0.01)


def test_zero_model_predicts_half():
    for spec in (ModelSpec("logistic", 4), ModelSpec("mlp", 4, 3)):
        m = ModelState(spec, np.zeros(spec.n_params))
        np.testing.assert_array_equal(forward(m, np.ones((5, 4))), 0.5)


def test_logistic_forward_by_hand():
    m = ModelState(ModelSpec("logistic", 3), np.array([1.0, 0.0, 0.0, 0.0]))
    assert forward(m, np.array([[math.log(3), 0.0, 0.0]]))[0] == pytest.approx(0.75, abs=1e-15)


def test_forward_range_and_saturation():
    m = init_model(ModelSpec("mlp", 6, 8), derive_stream(1, Purpose.INIT))
    p = forward(m, np.random.default_rng(0).standard_normal((50, 6)))
    assert np.all((p > 0) & (p < 1))
    big = ModelState(ModelSpec("logistic", 1), np.array([1.0, 0.0]))
    p = forward(big, np.array([[1000.0], [-1000.0]]))
    assert 0 < p[1] and p[0] < 1


def test_forward_dimension_mismatch():
    m = init_model(ModelSpec("logistic", 3), derive_stream(0, Purpose.INIT))
    with pytest.raises(ValidationError):
        forward(m, np.ones((2, 4)))


def test_bce_by_hand():
    assert bce_loss(np.full(4, 0.5), np.array([0, 1, 1, 0])) == pytest.approx(math.log(2), abs=1e-15)
    assert bce_loss(np.array([1.0, 0.0]), np.array([1, 0])) <= 1e-11
    assert bce_loss(np.array([0.9, 0.2]), np.array([1, 0])) == pytest.approx(-0.5 * (math.log(0.9) + math.log(0.8)), rel=1e-14)
    assert bce_loss(np.array([0.9, 0.2]), np.array([1, 0])) == pytest.approx(0.1643, abs=1e-4)
    with pytest.raises(ValidationError):
        bce_loss(np.array([]), np.array([]))


def test_logistic_gradient_by_hand():
    # p = sigmoid(ln 3 * 1) = 0.75 at x0 = ln 3 scaled; use w0 = ln(3)/2, x0 = 2
    m = ModelState(ModelSpec("logistic", 2), np.array([math.log(3) / 2, 0.0, 0.0]))
    g = backward(m, np.array([[2.0, 1.0]]), np.array([1]))
    assert g[0] == pytest.approx(-0.5, abs=1e-14)
    assert g[1] == pytest.approx(-0.25, abs=1e-14)
    assert g[2] == pytest.approx(-0.25, abs=1e-14)


def test_balanced_symmetric_batch_has_zero_bias_gradient():
    m = ModelState(ModelSpec("logistic", 2), np.zeros(3))
    x = np.array([[1.0, 2.0], [1.0, 2.0]])
    assert backward(m, x, np.array([1, 0]))[-1] == 0.0


@pytest.mark.parametrize("kind", ["logistic", "mlp"])
@pytest.mark.parametrize("batch", [1, 16])
def test_gradient_matches_finite_differences(kind, batch):
    gen = np.random.default_rng(100 + batch)
    spec = ModelSpec(kind, 5, 4)
    for point in range(10):
        model = ModelState(spec, gen.normal(0, 0.7, spec.n_params))
        x = gen.standard_normal((batch, 5))
        y = gen.integers(0, 2, batch)
        assert max_relative_error(backward(model, x, y), central_difference(model, x, y)) <= 1e-4


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), kind=st.sampled_from(["logistic", "mlp"]))
def test_loss_permutation_invariant(seed, kind):
    gen = np.random.default_rng(seed)
    spec = ModelSpec(kind, 3, 4)
    model = ModelState(spec, gen.standard_normal(spec.n_params))
    x = gen.standard_normal((12, 3))
    y = gen.integers(0, 2, 12)
    perm = gen.permutation(12)
    a = bce_loss(forward(model, x), y)
    b = bce_loss(forward(model, x[perm]), y[perm])
    assert a == pytest.approx(b, rel=1e-12)
    np.testing.assert_array_equal(forward(model, x), forward(model, x))


def test_checkpoint_round_trip(tmp_path):
    m = init_model(ModelSpec("mlp", 4, 3), derive_stream(2, Purpose.INIT))
    save_checkpoint(m, tmp_path / "ck.txt")
    assert load_checkpoint(tmp_path / "ck.txt") == m
