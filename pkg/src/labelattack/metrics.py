"""Clean-label evaluation: ROC AUC and thresholded accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import ValidationError


@dataclass(frozen=True)
class EvalResult:
    auc: float
    accuracy: float
    n_pos: int
    n_neg: int


def auc_roc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg), ties counted as 1/2."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape:
        raise ValidationError(f"length mismatch: {s.shape} vs {y.shape}")
    if not np.all(np.isfinite(s)):
        raise ValidationError("scores must be finite")
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValidationError(f"AUC undefined with {n_pos} positives and {n_neg} negatives")
    # average ranks are half-integers, so u is exact
    u = rankdata(s)[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def accuracy(scores, labels, threshold: float = 0.5) -> float:
    """Fraction with ``(score >= threshold) == label``."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape:
        raise ValidationError(f"length mismatch: {s.shape} vs {y.shape}")
    if s.size == 0:
        raise ValidationError("accuracy of an empty set")
    return float(np.mean((s >= threshold) == (y == 1)))
