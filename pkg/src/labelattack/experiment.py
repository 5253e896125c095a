"""Sweeps over prior-noise and attack probabilities, written as long-format CSV."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .core import ValidationError
from .noise import AttackSpec, NoiseSpec
from .optim import OptimizerConfig
from .trainer import TrainConfig, train

SweepKind = Literal["prior_only", "attack_only", "combined"]

# Desk-scale learning rate for the reproduction sweeps. 1e-4 suits fine-tuning
# a pretrained network; a freshly initialised 17-parameter model barely moves
# in 100 epochs at that rate.
DESK_LEARNING_RATE = 3e-3

TABLE1_P1 = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
TABLE2_P2 = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
TABLE3_P1 = (0.1, 0.2, 0.3, 0.4, 0.5)
TABLE3_P2 = 0.25


def desk_config(**overrides) -> TrainConfig:
    """Default run settings for sweeps: the standard protocol at desk-scale learning rate."""
    return replace(TrainConfig(optimizer=OptimizerConfig(learning_rate=DESK_LEARNING_RATE)), **overrides)


RESULT_COLUMNS = ["sweep_kind", "role", "p1", "p2", "seed", "status", "test_auc", "test_accuracy",
                  "stopped_epoch", "best_epoch", "error"]
SUMMARY_COLUMNS = ["sweep_kind", "role", "p1", "p2", "n_runs", "n_failed", "mean_auc", "std_auc",
                   "mean_accuracy", "mean_stopped_epoch", "auc_gain"]


@dataclass(frozen=True)
class SweepSpec:
    sweep_kind: SweepKind
    p1_values: tuple[float, ...] = (0.0,)
    p2_values: tuple[float, ...] = (0.0,)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    output_path: str | None = None
    base: TrainConfig = field(default_factory=lambda: desk_config())
    noise_mode: str = "bernoulli"
    workers: int = 1

    def __post_init__(self):
        if self.sweep_kind not in ("prior_only", "attack_only", "combined"):
            raise ValidationError(f"unknown sweep_kind {self.sweep_kind!r}")
        if not self.seeds:
            raise ValidationError("a sweep needs at least one seed")
        for p in (*self.p1_values, *self.p2_values):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"sweep probabilities must lie in [0, 1], got {p}")

    def cells(self) -> list[tuple[str, float, float]]:
        """(role, p1, p2) cells; combined sweeps add unattacked baselines per p1."""
        if self.sweep_kind == "prior_only":
            return [("cell", p1, 0.0) for p1 in self.p1_values]
        if self.sweep_kind == "attack_only":
            return [("cell", 0.0, p2) for p2 in self.p2_values]
        baselines = [("baseline", p1, 0.0) for p1 in self.p1_values]
        # p2 = 0 is the baseline itself
        return baselines + [("cell", p1, p2) for p1 in self.p1_values for p2 in self.p2_values if p2 != 0.0]

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        # overlay the "train" section onto the desk-scale defaults, one level deep
        merged = asdict(desk_config())
        for key, value in (d.pop("train", None) or {}).items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = {**merged[key], **value}
            else:
                merged[key] = value
        base = TrainConfig.from_dict(merged)
        if isinstance(d.get("p2_values"), (int, float)):
            d["p2_values"] = [d["p2_values"]]
        for key in ("p1_values", "p2_values", "seeds"):
            if key in d:
                d[key] = tuple(d[key])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown sweep keys: {sorted(unknown)}")
        return cls(base=base, **d)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "SweepSpec":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except FileNotFoundError:
            raise ValidationError(f"no such sweep config: {path}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None


@dataclass(frozen=True)
class SweepRow:
    sweep_kind: str
    role: str
    p1: float
    p2: float
    seed: int
    status: str
    test_auc: float = math.nan
    test_accuracy: float = math.nan
    stopped_epoch: int = 0
    best_epoch: int = 0
    error: str = ""


@dataclass(frozen=True)
class SummaryRow:
    sweep_kind: str
    role: str
    p1: float
    p2: float
    n_runs: int
    n_failed: int
    mean_auc: float
    std_auc: float
    mean_accuracy: float
    mean_stopped_epoch: float
    auc_gain: float | None = None


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow]
    summary: list[SummaryRow]

    def cell(self, p1: float, p2: float, role: str = "cell") -> SummaryRow:
        for s in self.summary:
            if s.p1 == p1 and s.p2 == p2 and s.role == role:
                return s
        raise KeyError((p1, p2, role))


def table_specs(seeds: Sequence[int] = (0, 1, 2, 3, 4), output_dir: str | os.PathLike | None = None,
                base: TrainConfig | None = None, workers: int = 1) -> dict[str, SweepSpec]:
    """The three reproduction sweeps: prior noise only, attacks only, both."""
    base = base or desk_config()
    out = (lambda name: str(Path(output_dir) / f"{name}.csv")) if output_dir else (lambda name: None)
    seeds = tuple(seeds)
    return {
        "table1": SweepSpec("prior_only", TABLE1_P1, (0.0,), seeds, out("table1_prior_only"), base, workers=workers),
        "table2": SweepSpec("attack_only", (0.0,), TABLE2_P2, seeds, out("table2_attack_only"), base, workers=workers),
        "table3": SweepSpec("combined", TABLE3_P1, (TABLE3_P2,), seeds, out("table3_combined"), base, workers=workers),
    }


def cell_config(spec: SweepSpec, p1: float, p2: float, seed: int) -> TrainConfig:
    # prior noise depends only on (seed, p1), so baseline and attacked runs share corrupted labels
    return replace(spec.base, noise=NoiseSpec.symmetric(p1, spec.noise_mode), attack=AttackSpec(p2), master_seed=seed)


def _run_cell(args) -> SweepRow:
    spec, role, p1, p2, seed = args
    try:
        report = train(cell_config(spec, p1, p2, seed))
    except Exception as exc:  # failed cells are recorded, the sweep continues
        return SweepRow(spec.sweep_kind, role, p1, p2, seed, "failed", error=f"{type(exc).__name__}: {exc}")
    return SweepRow(spec.sweep_kind, role, p1, p2, seed, "ok", report.test_auc, report.test_accuracy,
                    report.stopped_epoch, report.best_epoch)


def _summarize(spec: SweepSpec, rows: Sequence[SweepRow]) -> list[SummaryRow]:
    summary = []
    for role, p1, p2 in spec.cells():
        cell_rows = [r for r in rows if (r.role, r.p1, r.p2) == (role, p1, p2)]
        ok = [r for r in cell_rows if r.status == "ok"]
        aucs = np.array([r.test_auc for r in ok])
        summary.append(SummaryRow(
            spec.sweep_kind, role, p1, p2, len(ok), len(cell_rows) - len(ok),
            float(aucs.mean()) if ok else math.nan,
            float(aucs.std(ddof=1)) if len(ok) > 1 else 0.0,
            float(np.mean([r.test_accuracy for r in ok])) if ok else math.nan,
            float(np.mean([r.stopped_epoch for r in ok])) if ok else math.nan,
        ))
    if spec.sweep_kind == "combined":
        base = {s.p1: s.mean_auc for s in summary if s.role == "baseline"}
        summary = [replace(s, auc_gain=s.mean_auc - base[s.p1]) if s.role == "cell" else s for s in summary]
    return summary


def run_sweep(spec: SweepSpec) -> SweepResult:
    jobs = [(spec, role, p1, p2, seed) for role, p1, p2 in spec.cells() for seed in spec.seeds]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_run_cell, jobs))
    else:
        rows = [_run_cell(job) for job in jobs]
    # baselines first, then by (p1, p2, seed), independent of completion order
    rows.sort(key=lambda r: (r.role != "baseline", r.p1, r.p2, r.seed))
    result = SweepResult(spec, rows, _summarize(spec, rows))
    if spec.output_path:
        write_sweep(result, spec.output_path)
    return result


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def summary_path(output_path: str | os.PathLike) -> Path:
    p = Path(output_path)
    return p.with_name(p.stem + "_summary" + p.suffix)


def config_path(output_path: str | os.PathLike) -> Path:
    p = Path(output_path)
    return p.with_name(p.stem + "_config.json")


def write_sweep(result: SweepResult, output_path: str | os.PathLike) -> None:
    """Per-run rows to ``output_path``; aggregates and the full config alongside it."""
    for path, columns, rows in (
        (Path(output_path), RESULT_COLUMNS, result.rows),
        (summary_path(output_path), SUMMARY_COLUMNS, result.summary),
    ):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(getattr(r, c)) for c in columns])
    with open(config_path(output_path), "w") as fh:
        json.dump(asdict(result.spec), fh, indent=2, sort_keys=True)
        fh.write("\n")


def format_table(result: SweepResult) -> str:
    """Fixed-width table: one column per probability, mean AUC (and gain) rows."""
    cells = [s for s in result.summary if s.role == "cell"]
    if result.spec.sweep_kind == "attack_only":
        head, values = "p2", [s.p2 for s in cells]
    else:
        head, values = "p1", [s.p1 for s in cells]
    lines = [f"{head:<10}" + "".join(f"{v:>9.2f}" for v in values),
             f"{'AUC':<10}" + "".join(f"{s.mean_auc:>9.3f}" for s in cells),
             f"{'(std)':<10}" + "".join(f"{s.std_auc:>9.3f}" for s in cells)]
    if result.spec.sweep_kind == "combined":
        lines.append(f"{'AUC gain':<10}" + "".join(f"{s.auc_gain:>+9.3f}" for s in cells))
    return "\n".join(lines)
