"""End-to-end training run with prior label noise and per-epoch label attacks.

Pipeline for one run:

1. build or load the dataset (stored labels == clean labels)
2. stratified 70/10/20 split
3. prior noise on the training split only
4. per epoch: attack the stored train labels, shuffle, mini-batch Adam on BCE
   against the attacked labels
5. validation accuracy against clean labels, early stopping with best-epoch
   restore
6. AUC and accuracy on the clean test split

Every random draw comes from a stream derived from ``master_seed``, so a run
is a pure function of its config.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    LabeledExample,
    Purpose,
    TrainingError,
    ValidationError,
    clean_labels,
    derive_stream,
    feature_matrix,
    split_dataset,
    stored_labels,
)
from .data import SyntheticConfig, generate_synthetic, load_csv
from .metrics import EvalResult, accuracy, auc_roc
from .model import ModelSpec, ModelState, forward, init_model, loss_and_gradient
from .noise import AttackSpec, NoiseSpec, ScenarioCounts, classify_scenarios, epoch_attack_labels, inject_prior_noise
from .optim import EarlyStopState, OptimizerConfig, OptimizerState, adam_step, early_stop_update

SPLIT_FRACTIONS = (0.7, 0.1, 0.2)


@dataclass(frozen=True)
class TrainConfig:
    model_kind: str = "logistic"
    hidden_units: int = 32
    init_scale: float | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    batch_size: int = 16
    patience: int = 8
    max_epochs: int = 100
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    attack: AttackSpec = field(default_factory=AttackSpec)
    master_seed: int = 0
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    csv_path: str | None = None
    # ablation only: also corrupt validation labels used for early stopping
    corrupt_validation: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.master_seed < 0:
            raise ValidationError("master_seed must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        nested = {"optimizer": OptimizerConfig, "noise": NoiseSpec, "attack": AttackSpec, "synthetic": SyntheticConfig}
        for key, typ in nested.items():
            if isinstance(d.get(key), dict):
                d[key] = typ(**d[key])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_accuracy: float
    scenarios: ScenarioCounts


@dataclass
class TrainReport:
    epochs: list[EpochRecord]
    best_epoch: int
    stopped_epoch: int
    best_val_accuracy: float
    test_auc: float
    test_accuracy: float
    n_train: int
    n_prior_corrupted: int
    config: dict

    @property
    def n_actual(self) -> int:
        return self.stopped_epoch

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_actual"] = self.n_actual
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def epoch_table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_accuracy", "n_cl_given_cl", "n_cl_given_co", "n_co_given_cl", "n_co_given_co"])
        for r in self.epochs:
            s = r.scenarios
            w.writerow([r.epoch, repr(r.train_loss), repr(r.val_accuracy),
                        s.n_cl_given_cl, s.n_cl_given_co, s.n_co_given_cl, s.n_co_given_co])
        return buf.getvalue()

    def total_scenarios(self) -> ScenarioCounts:
        total = ScenarioCounts()
        for r in self.epochs:
            total = total + r.scenarios
        return total


def evaluate_checkpoint(model: ModelState, split: Sequence[LabeledExample], threshold: float = 0.5) -> EvalResult:
    """Score ``split`` and compare against clean labels only."""
    if len(split) == 0:
        raise ValidationError("cannot evaluate an empty split")
    scores = forward(model, feature_matrix(split))
    y = clean_labels(split)
    n_pos = int(y.sum())
    return EvalResult(auc_roc(scores, y), accuracy(scores, y, threshold), n_pos, len(y) - n_pos)


def load_examples(config: TrainConfig) -> list[LabeledExample]:
    if config.csv_path is not None:
        examples = load_csv(config.csv_path)
        if any(e.prior_corrupted for e in examples):
            raise ValidationError(f"{config.csv_path}: training input must be uncorrupted; noise is injected by the run")
        return examples
    return generate_synthetic(config.synthetic, derive_stream(config.master_seed, Purpose.DATA_GEN))


def prepare_training_data(config: TrainConfig):
    """Steps 1-3: dataset, split, prior noise on the train split."""
    examples = load_examples(config)
    split = split_dataset(examples, SPLIT_FRACTIONS, derive_stream(config.master_seed, Purpose.SHUFFLE, 0))
    noise_stream = derive_stream(config.master_seed, Purpose.PRIOR_NOISE, 0)
    train = inject_prior_noise(split.train, config.noise, noise_stream)
    validation = list(split.validation)
    if config.corrupt_validation:
        validation = inject_prior_noise(validation, config.noise, derive_stream(config.master_seed, Purpose.PRIOR_NOISE, 1))
    return train, validation, list(split.test)


def train(config: TrainConfig) -> TrainReport:
    return train_with_model(config)[0]


def train_with_model(config: TrainConfig) -> tuple[TrainReport, ModelState]:
    """Run the full pipeline; returns the report and the restored best-epoch model."""
    train_set, val_set, test_set = prepare_training_data(config)
    seed = config.master_seed

    x_train = feature_matrix(train_set)
    y_stored = stored_labels(train_set)
    corrupted = np.array([e.prior_corrupted for e in train_set], dtype=bool)
    x_val = feature_matrix(val_set)
    # early stopping sees clean validation labels unless the ablation flag is set
    y_val = stored_labels(val_set) if config.corrupt_validation else clean_labels(val_set)

    spec = ModelSpec(config.model_kind, x_train.shape[1], config.hidden_units, config.init_scale)
    model = init_model(spec, derive_stream(seed, Purpose.INIT))
    opt = OptimizerState.zeros(spec.n_params)
    stopper = EarlyStopState(patience=config.patience, max_epochs=config.max_epochs)
    n = len(train_set)
    records = []

    for epoch in range(1, config.max_epochs + 1):
        epoch_labels, flips = epoch_attack_labels(y_stored, config.attack, derive_stream(seed, Purpose.EPOCH_ATTACK, epoch))
        scenarios = classify_scenarios(corrupted, flips)
        order = derive_stream(seed, Purpose.SHUFFLE, epoch).generator().permutation(n)

        loss_sum = 0.0
        theta = model.parameters
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            loss, grad = loss_and_gradient(ModelState(spec, theta), x_train[idx], epoch_labels[idx])
            if not math.isfinite(loss):
                raise TrainingError(f"non-finite training loss at epoch {epoch}")
            loss_sum += loss * len(idx)
            theta, opt = adam_step(theta, opt, grad, config.optimizer)
        model = ModelState(spec, theta)

        val_acc = accuracy(forward(model, x_val), y_val)
        records.append(EpochRecord(epoch, loss_sum / n, val_acc, scenarios))
        stopper, decision = early_stop_update(stopper, epoch, val_acc, model)
        if decision == "stop":
            break

    best = stopper.best_checkpoint
    test = evaluate_checkpoint(best, test_set)
    report = TrainReport(
        epochs=records,
        best_epoch=stopper.best_epoch,
        stopped_epoch=records[-1].epoch,
        best_val_accuracy=stopper.best_metric,
        test_auc=test.auc,
        test_accuracy=test.accuracy,
        n_train=n,
        n_prior_corrupted=int(corrupted.sum()),
        config=config.to_dict(),
    )
    return report, best
