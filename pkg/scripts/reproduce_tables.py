"""Run the three noise sweeps (prior only, attack only, combined) and print the tables.

    python scripts/reproduce_tables.py --seeds 10 --out results/ --workers 4

Each cell is the seed-averaged clean test AUC. Per-run rows, per-cell
summaries and the sweep config are written next to each CSV.
"""

import argparse
from pathlib import Path

from labelattack.experiment import format_table, run_sweep, table_specs



def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--out", default="results")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    Path(args.out).mkdir(parents=True, exist_ok=True)
    for name, spec in table_specs(range(args.seeds), args.out, workers=args.workers).items():
        result = run_sweep(spec)
        print(f"\n== {name}: {spec.sweep_kind}, {args.seeds} seeds -> {spec.output_path}")
        print(format_table(result))


if __name__ == "__main__":
    main()
