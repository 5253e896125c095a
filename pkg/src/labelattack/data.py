"""Synthetic two-Gaussian datasets and CSV ingestion/egress.

CSV layout: ``id,label,f0,...,f{d-1}``. Corrupted datasets additionally carry
``clean_label`` and ``prior_corrupted`` columns right after ``label``; the
``label`` column always holds the stored (possibly corrupted) label.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LabeledExample, RngStream, ValidationError

# Frozen by scripts/calibrate_separation.py: clean-label logistic regression
# trained with the default pipeline lands at test AUC ~0.92.
DEFAULT_CLASS_SEPARATION = 2.0

_RESERVED = ("id", "label", "clean_label", "prior_corrupted")


@dataclass(frozen=True)
class SyntheticConfig:
    n_examples: int = 800
    n_features: int = 16
    class_separation: float = DEFAULT_CLASS_SEPARATION
    positive_fraction: float = 0.5

    def __post_init__(self):
        if self.n_examples < 10:
            raise ValidationError(f"n_examples must be at least 10, got {self.n_examples}")
        if self.n_features < 1:
            raise ValidationError(f"n_features must be at least 1, got {self.n_features}")
        if self.class_separation < 0:
            raise ValidationError(f"class_separation must be non-negative, got {self.class_separation}")
        if not 0.0 < self.positive_fraction < 1.0:
            raise ValidationError(f"positive_fraction must lie in (0, 1), got {self.positive_fraction}")


def generate_synthetic(config: SyntheticConfig, rng: RngStream) -> list[LabeledExample]:
    """Unit-variance isotropic Gaussians centred at +/- separation/2 along the first axis."""
    gen = rng.generator()
    n_pos = int(round(config.n_examples * config.positive_fraction))
    labels = np.zeros(config.n_examples, dtype=np.int8)
    labels[gen.permutation(config.n_examples)[:n_pos]] = 1

    x = gen.standard_normal((config.n_examples, config.n_features))
    x[:, 0] += np.where(labels == 1, 0.5, -0.5) * config.class_separation
    return [LabeledExample.clean(i, x[i], labels[i]) for i in range(config.n_examples)]


def _parse_label(value: str, column: str, row: int) -> int:
    if value.strip() not in ("0", "1"):
        raise ValidationError(f"row {row}: {column} must be 0 or 1, got {value!r}")
    return int(value)


def load_csv(path: str | os.PathLike) -> list[LabeledExample]:
    """Read a dataset CSV. Ids are reassigned 0..N-1 in file order.

    Row numbers in error messages count the header as row 1.
    """
    if not os.path.exists(path):
        raise ValidationError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError(f"{path}: empty file, expected a header row") from None
        if "label" not in header:
            raise ValidationError(f"{path}: header has no 'label' column")
        col = {name: i for i, name in enumerate(header)}
        feature_cols = [i for i, name in enumerate(header) if name not in _RESERVED]

        examples = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"row {row_no}: expected {len(header)} columns, got {len(row)}")
            stored = _parse_label(row[col["label"]], "label", row_no)
            clean = _parse_label(row[col["clean_label"]], "clean_label", row_no) if "clean_label" in col else stored
            try:
                features = tuple(float(row[i]) for i in feature_cols)
            except ValueError as exc:
                raise ValidationError(f"row {row_no}: non-numeric feature ({exc})") from None
            if "prior_corrupted" in col:
                flag = row[col["prior_corrupted"]].strip()
                if flag not in ("0", "1") or (flag == "1") != (stored != clean):
                    raise ValidationError(f"row {row_no}: prior_corrupted {flag!r} inconsistent with labels")
            examples.append(LabeledExample(len(examples), features, clean, stored, stored != clean))
    return examples


def write_csv(examples: Sequence[LabeledExample], path: str | os.PathLike, with_clean: bool | None = None) -> None:
    """Write examples sorted by id. Floats use shortest round-trip repr.

    ``with_clean`` adds the clean_label/prior_corrupted columns; by default
    they are written only when some example is corrupted.
    """
    examples = sorted(examples, key=lambda e: e.id)
    n_features = len(examples[0].features) if examples else 0
    if with_clean is None:
        with_clean = any(e.prior_corrupted for e in examples)
    header = ["id", "label"] + (["clean_label", "prior_corrupted"] if with_clean else [])
    header += [f"f{j}" for j in range(n_features)]
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from None
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for e in examples:
            row = [e.id, e.stored_label]
            if with_clean:
                row += [e.clean_label, int(e.prior_corrupted)]
            writer.writerow(row + [repr(float(x)) for x in e.features])


def write_flip_mask(examples: Sequence[LabeledExample], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "clean_label", "stored_label", "prior_corrupted"])
        for e in sorted(examples, key=lambda e: e.id):
            writer.writerow([e.id, e.clean_label, e.stored_label, int(e.prior_corrupted)])
