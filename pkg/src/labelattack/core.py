"""Domain types, seeded randomness streams and dataset splitting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np


class ValidationError(ValueError):
    """Bad input or configuration (CLI exit code 1)."""


class TrainingError(RuntimeError):
    """Failure while a run is executing (CLI exit code 2)."""


class Purpose(enum.IntEnum):
    PRIOR_NOISE = 0
    EPOCH_ATTACK = 1
    SHUFFLE = 2
    INIT = 3
    DATA_GEN = 4


@dataclass(frozen=True)
class LabeledExample:
    id: int
    features: tuple[float, ...]
    clean_label: int
    stored_label: int
    prior_corrupted: bool = False

    def __post_init__(self):
        if self.clean_label not in (0, 1) or self.stored_label not in (0, 1):
            raise ValidationError(f"example {self.id}: labels must be 0 or 1")
        if self.prior_corrupted != (self.stored_label != self.clean_label):
            raise ValidationError(f"example {self.id}: prior_corrupted flag disagrees with labels")

    @classmethod
    def clean(cls, id: int, features: Sequence[float], label: int) -> "LabeledExample":
        return cls(id, tuple(float(x) for x in features), int(label), int(label), False)

    def with_stored_label(self, stored_label: int) -> "LabeledExample":
        return replace(self, stored_label=stored_label, prior_corrupted=stored_label != self.clean_label)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream keyed by (master_seed, purpose, index).

    Built on numpy's ``SeedSequence`` spawn keys, so every key maps to its own
    independent PCG64 stream and no stream depends on how many draws another
    one consumed.
    """

    master_seed: int
    purpose_tag: Purpose
    index: int = 0

    def _seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=(int(self.purpose_tag), self.index))

    @property
    def seed(self) -> int:
        """Derived 64-bit sub-seed for this stream."""
        return int(self._seed_sequence().generate_state(1, np.uint64)[0])

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of the stream."""
        return np.random.Generator(np.random.PCG64(self._seed_sequence()))


def derive_stream(master_seed: int, purpose_tag: Purpose | str, index: int = 0) -> RngStream:
    if isinstance(purpose_tag, str):
        purpose_tag = Purpose[purpose_tag.upper()]
    if master_seed < 0 or index < 0:
        raise ValidationError("master_seed and index must be non-negative")
    return RngStream(int(master_seed), Purpose(purpose_tag), int(index))


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[LabeledExample, ...]
    validation: tuple[LabeledExample, ...]
    test: tuple[LabeledExample, ...]
    split_fractions: tuple[float, float, float] = field(default=(0.7, 0.1, 0.2))


def _apportion(total: int, weights: Sequence[float]) -> list[int]:
    # largest-remainder rounding; ties go to the earlier partition
    raw = [total * w for w in weights]
    counts = [math.floor(r) for r in raw]
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


def split_dataset(
    examples: Sequence[LabeledExample],
    fractions: tuple[float, float, float] = (0.7, 0.1, 0.2),
    rng: RngStream | None = None,
) -> DatasetSplit:
    """Stratified shuffle-split into train / validation / test.

    Partition sizes follow ``fractions`` by largest-remainder rounding; within
    each partition the class mix follows the source mix as closely as
    integer counts allow.
    """
    if len(examples) == 0:
        raise ValidationError("cannot split an empty dataset")
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"split fractions must be three non-negative numbers summing to 1, got {fractions}")
    if rng is None:
        rng = derive_stream(0, Purpose.SHUFFLE)

    n = len(examples)
    sizes = _apportion(n, fractions)
    if min(sizes) == 0:
        raise ValidationError(f"split {fractions} of {n} examples leaves an empty partition (sizes {sizes})")

    gen = rng.generator()
    positives = [e for e in examples if e.clean_label == 1]
    negatives = [e for e in examples if e.clean_label == 0]
    pos_order = gen.permutation(len(positives))
    neg_order = gen.permutation(len(negatives))

    pos_sizes = _apportion(len(positives), [s / n for s in sizes])
    neg_sizes = [s - p for s, p in zip(sizes, pos_sizes)]

    parts: list[list[LabeledExample]] = []
    pos_at = neg_at = 0
    for n_pos, n_neg in zip(pos_sizes, neg_sizes):
        part = [positives[i] for i in pos_order[pos_at : pos_at + n_pos]]
        part += [negatives[i] for i in neg_order[neg_at : neg_at + n_neg]]
        pos_at += n_pos
        neg_at += n_neg
        parts.append(sorted(part, key=lambda e: e.id))

    return DatasetSplit(tuple(parts[0]), tuple(parts[1]), tuple(parts[2]), tuple(float(f) for f in fractions))


def feature_matrix(examples: Sequence[LabeledExample]) -> np.ndarray:
    if not examples:
        return np.zeros((0, 0))
    return np.array([e.features for e in examples], dtype=np.float64)


def clean_labels(examples: Sequence[LabeledExample]) -> np.ndarray:
    return np.array([e.clean_label for e in examples], dtype=np.int8)


def stored_labels(examples: Sequence[LabeledExample]) -> np.ndarray:
    return np.array([e.stored_label for e in examples], dtype=np.int8)
