import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelattack.core import (
    LabeledExample,
    Purpose,
    ValidationError,
    derive_stream,
    split_dataset,
)

from conftest import make_examples


def draws(stream, n=100):
    return stream.generator().random(n)


def test_stream_is_deterministic():
    a = derive_stream(42, Purpose.EPOCH_ATTACK, 3)
    b = derive_stream(42, "epoch_attack", 3)
    assert a == b
    assert a.seed == b.seed
    np.testing.assert_array_equal(draws(a), draws(b))


@pytest.mark.parametrize(
    "other",
    [(42, Purpose.EPOCH_ATTACK, 4), (43, Purpose.EPOCH_ATTACK, 3), (42, Purpose.PRIOR_NOISE, 3)],
)
def test_changing_any_argument_changes_stream(other):
    base = draws(derive_stream(42, Purpose.EPOCH_ATTACK, 3))
    changed = draws(derive_stream(*other))
    assert not np.any(base == changed)


def test_prior_noise_streams_differ_by_seed():
    assert not np.any(draws(derive_stream(42, Purpose.PRIOR_NOISE, 0)) == draws(derive_stream(43, Purpose.PRIOR_NOISE, 0)))


def test_purpose_streams_uncorrelated():
    streams = [draws(derive_stream(7, p), 10_000) for p in Purpose]
    for i in range(len(streams)):
        for j in range(i + 1, len(streams)):
            assert abs(np.corrcoef(streams[i], streams[j])[0, 1]) < 0.05


def test_labeled_example_invariant():
    with pytest.raises(ValidationError):
        LabeledExample(0, (1.0,), 1, 0, prior_corrupted=False)
    with pytest.raises(ValidationError):
        LabeledExample(0, (1.0,), 2, 2)
    e = LabeledExample.clean(0, [1.0], 1).with_stored_label(0)
    assert e.prior_corrupted and e.clean_label == 1


def test_split_800_sizes(balanced_800):
    split = split_dataset(balanced_800, (0.7, 0.1, 0.2), derive_stream(1, Purpose.SHUFFLE))
    assert (len(split.train), len(split.validation), len(split.test)) == (560, 80, 160)
    assert [sum(e.clean_label for e in part) for part in (split.train, split.validation, split.test)] == [280, 40, 80]


def test_split_rejects_empty_partition():
    with pytest.raises(ValidationError):
        split_dataset(make_examples([0, 1] * 5), (1.0, 0.0, 0.0), derive_stream(0, Purpose.SHUFFLE))


def test_split_rejects_bad_fractions():
    with pytest.raises(ValidationError):
        split_dataset(make_examples([0, 1] * 5), (0.5, 0.1, 0.2), derive_stream(0, Purpose.SHUFFLE))
    with pytest.raises(ValidationError):
        split_dataset([], (0.7, 0.1, 0.2), derive_stream(0, Purpose.SHUFFLE))


def test_split_deterministic(balanced_800):
    rng = derive_stream(5, Purpose.SHUFFLE)
    assert split_dataset(balanced_800, rng=rng) == split_dataset(balanced_800, rng=rng)
    assert split_dataset(balanced_800, rng=rng) != split_dataset(balanced_800, rng=derive_stream(6, Purpose.SHUFFLE))


@settings(max_examples=60, deadline=None)
@given(
    labels=st.lists(st.integers(0, 1), min_size=10, max_size=120),
    seed=st.integers(0, 2**32),
)
def test_split_is_stratified_permutation(labels, seed):
    examples = make_examples(labels)
    try:
        split = split_dataset(examples, (0.7, 0.1, 0.2), derive_stream(seed, Purpose.SHUFFLE))
    except ValidationError:
        return
    parts = (split.train, split.validation, split.test)
    ids = sorted(e.id for part in parts for e in part)
    assert ids == list(range(len(examples)))
    n, n_pos = len(labels), sum(labels)
    for part, frac in zip(parts, (0.7, 0.1, 0.2)):
        assert abs(len(part) - frac * n) <= 1
        # class mix within one example per class of the source mix
        assert abs(sum(e.clean_label for e in part) - len(part) * n_pos / n) <= 1
