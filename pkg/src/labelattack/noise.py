"""Prior label corruption, per-epoch label attacks and scenario accounting.

Each training label ends an epoch in one of four states, keyed by where it
started (clean or prior-corrupted) and whether this epoch's attack flipped it:

    cl|cl  clean, not flipped        -> correct this epoch
    cl|co  corrupted, flipped back   -> correct this epoch
    co|cl  clean, flipped            -> wrong this epoch
    co|co  corrupted, not flipped    -> wrong this epoch
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import LabeledExample, RngStream, ValidationError


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValidationError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class NoiseSpec:
    p_p: float = 0.0  # P(stored 0 | clean 1)
    p_n: float = 0.0  # P(stored 1 | clean 0)
    mode: Literal["bernoulli", "exact_count"] = "bernoulli"

    def __post_init__(self):
        _check_prob("p_p", self.p_p)
        _check_prob("p_n", self.p_n)
        if self.mode not in ("bernoulli", "exact_count"):
            raise ValidationError(f"unknown noise mode {self.mode!r}")

    @classmethod
    def symmetric(cls, p1: float, mode: str = "bernoulli") -> "NoiseSpec":
        return cls(p1, p1, mode)


@dataclass(frozen=True)
class AttackSpec:
    p2: float = 0.0

    def __post_init__(self):
        _check_prob("p2", self.p2)


@dataclass(frozen=True)
class ScenarioProbabilities:
    p_cl_given_cl: float
    p_cl_given_co: float
    p_co_given_cl: float
    p_co_given_co: float
    p_clean: float
    p_corrupt: float


@dataclass(frozen=True)
class ScenarioCounts:
    n_cl_given_cl: int = 0
    n_cl_given_co: int = 0
    n_co_given_cl: int = 0
    n_co_given_co: int = 0

    @property
    def total(self) -> int:
        return self.n_cl_given_cl + self.n_cl_given_co + self.n_co_given_cl + self.n_co_given_co

    def __add__(self, other: "ScenarioCounts") -> "ScenarioCounts":
        return ScenarioCounts(
            self.n_cl_given_cl + other.n_cl_given_cl,
            self.n_cl_given_co + other.n_cl_given_co,
            self.n_co_given_cl + other.n_co_given_cl,
            self.n_co_given_co + other.n_co_given_co,
        )

    def fractions(self) -> tuple[float, float, float, float]:
        t = self.total
        return (self.n_cl_given_cl / t, self.n_cl_given_co / t, self.n_co_given_cl / t, self.n_co_given_co / t)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def inject_prior_noise(
    examples: Sequence[LabeledExample], spec: NoiseSpec, rng: RngStream
) -> list[LabeledExample]:
    """Flip stored labels once, before training.

    Bernoulli mode flips each positive with ``p_p`` and each negative with
    ``p_n``. Exact-count mode flips exactly ``round(p * class_size)`` examples
    per class, chosen uniformly without replacement.
    """
    if any(e.prior_corrupted for e in examples):
        raise ValidationError("inject_prior_noise expects uncorrupted examples")
    gen = rng.generator()
    labels = np.array([e.clean_label for e in examples], dtype=np.int8)
    flip = np.zeros(len(examples), dtype=bool)

    if spec.mode == "bernoulli":
        u = gen.random(len(examples))
        flip = np.where(labels == 1, u < spec.p_p, u < spec.p_n)
    else:
        for cls, p in ((1, spec.p_p), (0, spec.p_n)):
            idx = np.flatnonzero(labels == cls)
            k = _round_half_up(p * len(idx))
            if k:
                flip[gen.choice(idx, size=k, replace=False)] = True

    return [e.with_stored_label(1 - e.clean_label) if f else e for e, f in zip(examples, flip)]


def epoch_attack_labels(
    stored_labels: Sequence[int] | np.ndarray, spec: AttackSpec, epoch_rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """Transient one-epoch flips of the stored labels.

    Returns ``(epoch_labels, flip_mask)``; the input is never modified.
    """
    stored = np.asarray(stored_labels, dtype=np.int8)
    flip_mask = epoch_rng.generator().random(stored.shape[0]) < spec.p2
    return stored ^ flip_mask.astype(np.int8), flip_mask


def scenario_probabilities(p1: float, p2: float) -> ScenarioProbabilities:
    _check_prob("p1", p1)
    _check_prob("p2", p2)
    cl_cl = (1 - p1) * (1 - p2)
    cl_co = p1 * p2
    co_cl = (1 - p1) * p2
    co_co = p1 * (1 - p2)
    return ScenarioProbabilities(cl_cl, cl_co, co_cl, co_co, cl_cl + cl_co, co_cl + co_co)


def classify_scenarios(
    prior_corrupted: Sequence[bool] | np.ndarray, flip_mask: Sequence[bool] | np.ndarray
) -> ScenarioCounts:
    corrupted = np.asarray(prior_corrupted, dtype=bool)
    flipped = np.asarray(flip_mask, dtype=bool)
    if corrupted.shape != flipped.shape:
        raise ValidationError(f"length mismatch: {corrupted.shape[0]} prior flags vs {flipped.shape[0]} flips")
    return ScenarioCounts(
        n_cl_given_cl=int(np.count_nonzero(~corrupted & ~flipped)),
        n_cl_given_co=int(np.count_nonzero(corrupted & flipped)),
        n_co_given_cl=int(np.count_nonzero(~corrupted & flipped)),
        n_co_given_co=int(np.count_nonzero(corrupted & ~flipped)),
    )
