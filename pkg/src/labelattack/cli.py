"""Command line entry point: generate, inject, derive-p2, train, sweep.

Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import binom
from .core import Purpose, ValidationError, derive_stream
from .data import DEFAULT_CLASS_SEPARATION, SyntheticConfig, generate_synthetic, load_csv, write_csv, write_flip_mask
from .experiment import SweepSpec, format_table, run_sweep, summary_path
from .model import save_checkpoint
from .noise import AttackSpec, NoiseSpec, inject_prior_noise
from .optim import OptimizerConfig
from .trainer import TrainConfig, train_with_model


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_synthetic_args(p):
    g = p.add_argument_group("synthetic data")
    g.add_argument("--n-examples", type=int, help="default 800")
    g.add_argument("--n-features", type=int, help="default 16")
    g.add_argument("--separation", type=float,
                   help=f"distance between class means in noise standard deviations (default {DEFAULT_CLASS_SEPARATION})")
    g.add_argument("--positive-fraction", type=float, help="default 0.5")


def _add_noise_args(p):
    g = p.add_argument_group("prior noise")
    g.add_argument("--p1", type=float, help="symmetric flip probability (sets both --p-pos and --p-neg)")
    g.add_argument("--p-pos", type=float, help="P(stored 0 | clean 1)")
    g.add_argument("--p-neg", type=float, help="P(stored 1 | clean 0)")
    g.add_argument("--noise-mode", choices=["bernoulli", "exact_count"])


def _synthetic(args, base: SyntheticConfig = SyntheticConfig()) -> SyntheticConfig:
    return SyntheticConfig(
        base.n_examples if args.n_examples is None else args.n_examples,
        base.n_features if args.n_features is None else args.n_features,
        base.class_separation if args.separation is None else args.separation,
        base.positive_fraction if args.positive_fraction is None else args.positive_fraction,
    )


def _noise(args, base: NoiseSpec = NoiseSpec()) -> NoiseSpec:
    p_p, p_n = base.p_p, base.p_n
    if args.p1 is not None:
        p_p = p_n = args.p1
    if args.p_pos is not None:
        p_p = args.p_pos
    if args.p_neg is not None:
        p_n = args.p_neg
    return NoiseSpec(p_p, p_n, args.noise_mode or base.mode)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="labelattack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic two-Gaussian dataset as CSV")
    _add_synthetic_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("inject", help="apply prior label noise to a dataset CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="corrupted dataset CSV")
    p.add_argument("--mask", required=True, help="flip-mask CSV (id, clean_label, stored_label, prior_corrupted)")
    p.add_argument("--seed", type=int, default=0)
    _add_noise_args(p)

    p = sub.add_parser("derive-p2", help="per-epoch attack probability from flip-count anchors")
    p.add_argument("--k1", type=int, default=0)
    p.add_argument("--k2", type=int, default=None, help="default: ceil(n/2)")
    p.add_argument("--n", type=int, default=None, help="expected epoch count")
    p.add_argument("--history", default=None, help="file of past run lengths (whitespace/comma separated)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("train", help="single training run -> JSON report + epoch CSV")
    p.add_argument("--config", default=None, help="JSON TrainConfig; flags given explicitly override it")
    p.add_argument("--csv", default=None, help="train on this dataset CSV instead of synthetic data")
    _add_synthetic_args(p)
    _add_noise_args(p)
    p.add_argument("--p2", type=float, help="per-epoch attack probability (default 0)")
    p.add_argument("--model", choices=["logistic", "mlp"], help="default logistic")
    p.add_argument("--hidden-units", type=int, help="mlp hidden width (default 32)")
    p.add_argument("--lr", type=float, help=f"Adam learning rate (default {OptimizerConfig.learning_rate})")
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--batch-size", type=int, help="default 16")
    p.add_argument("--patience", type=int, help="default 8")
    p.add_argument("--max-epochs", type=int, help="default 100")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--corrupt-validation", action="store_true", default=None,
                   help="ablation: noisy labels for early stopping")
    p.add_argument("--out-json", required=True)
    p.add_argument("--out-epochs", default=None, help="per-epoch CSV (default: next to the JSON)")
    p.add_argument("--checkpoint", default=None, help="write the restored best model here")

    p = sub.add_parser("sweep", help="run a sweep from a JSON SweepSpec")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="override output_path")
    p.add_argument("--workers", type=int, default=None)
    return parser


def _cmd_generate(args) -> None:
    examples = generate_synthetic(_synthetic(args), derive_stream(args.seed, Purpose.DATA_GEN))
    write_csv(examples, args.out)


def _cmd_inject(args) -> None:
    examples = load_csv(args.input)
    corrupted = inject_prior_noise(examples, _noise(args), derive_stream(args.seed, Purpose.PRIOR_NOISE))
    write_csv(corrupted, args.out, with_clean=True)
    write_flip_mask(corrupted, args.mask)
    n_flipped = sum(e.prior_corrupted for e in corrupted)
    print(f"flipped {n_flipped} of {len(corrupted)} labels")


def _read_history(path: str) -> list[int]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read history file {path}: {exc}") from None
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ValidationError(f"{path}: run lengths must be integers ({exc})") from None


def _cmd_derive_p2(args) -> None:
    if args.history is not None:
        n = binom.estimate_epoch_count(_read_history(args.history))
    elif args.n is not None:
        n = args.n
    else:
        raise ValidationError("give --n or --history")
    k2 = args.k2 if args.k2 is not None else -(-n // 2)
    d = binom.derive_p2(args.k1, k2, n)
    if args.json:
        print(json.dumps(asdict(d), indent=2, sort_keys=True))
        return
    print(f"n                        {d.n}")
    print(f"k1, k2                   {d.k1}, {d.k2}")
    print(f"mu                       {d.mu!r}")
    print(f"p2                       {d.p2!r}")
    print(f"P(never flipped)         {d.prob_never_flipped:.6g}")
    print(f"P(flipped >= ceil(n/2))  {d.prob_majority_flipped:.6g}")
    print(f"|B(k1) - B(k2)|          {d.symmetry_residual:.6g}")


def _cmd_train(args) -> None:
    base = TrainConfig()
    if args.config:
        try:
            base = TrainConfig.from_dict(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None

    def pick(value, fallback):
        return fallback if value is None else value

    opt = base.optimizer
    config = replace(
        base,
        model_kind=pick(args.model, base.model_kind),
        hidden_units=pick(args.hidden_units, base.hidden_units),
        optimizer=OptimizerConfig(
            pick(args.lr, opt.learning_rate), pick(args.beta1, opt.beta1),
            pick(args.beta2, opt.beta2), pick(args.epsilon, opt.epsilon),
        ),
        batch_size=pick(args.batch_size, base.batch_size),
        patience=pick(args.patience, base.patience),
        max_epochs=pick(args.max_epochs, base.max_epochs),
        noise=_noise(args, base.noise),
        attack=AttackSpec(args.p2) if args.p2 is not None else base.attack,
        master_seed=pick(args.seed, base.master_seed),
        synthetic=_synthetic(args, base.synthetic),
        csv_path=pick(args.csv, base.csv_path),
        corrupt_validation=pick(args.corrupt_validation, base.corrupt_validation),
    )

    report, best = train_with_model(config)
    out_json = Path(args.out_json)
    out_json.write_text(report.to_json())
    out_epochs = Path(args.out_epochs) if args.out_epochs else out_json.with_suffix(".epochs.csv")
    out_epochs.write_text(report.epoch_table_csv())
    if args.checkpoint:
        save_checkpoint(best, args.checkpoint)
    print(f"test AUC {report.test_auc:.4f}  accuracy {report.test_accuracy:.4f}  "
          f"best epoch {report.best_epoch}/{report.stopped_epoch}")


def _cmd_sweep(args) -> None:
    spec = SweepSpec.from_file(args.config)
    if args.out is not None:
        spec = replace(spec, output_path=args.out)
    if args.workers is not None:
        spec = replace(spec, workers=args.workers)
    result = run_sweep(spec)
    print(format_table(result))
    failed = sum(r.status != "ok" for r in result.rows)
    if failed:
        print(f"{failed} run(s) failed; see the error column", file=sys.stderr)
    if spec.output_path:
        print(f"wrote {spec.output_path} and {summary_path(spec.output_path)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            _cmd_generate(args)
        elif args.command == "inject":
            _cmd_inject(args)
        elif args.command == "derive-p2":
            _cmd_derive_p2(args)
        elif args.command == "train":
            _cmd_train(args)
        elif args.command == "sweep":
            _cmd_sweep(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
