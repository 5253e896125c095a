"""Paired-seed estimate of the AUC change caused by epoch-wise attacks.

For each seed the attacked and unattacked runs share data, split, prior
corruption, initialisation and batch order, so the per-seed difference
isolates the attack. Prints mean gain, a 95% t-interval, and the expected
per-epoch corrupt fraction p1 + p2 (1 - 2 p1) next to p1.

    python scripts/attack_gain_analysis.py --seeds 40 --model logistic mlp
"""

import argparse
from dataclasses import replace

import numpy as np
from scipy import stats

from labelattack.experiment import desk_config
from labelattack.noise import AttackSpec, NoiseSpec, scenario_probabilities
from labelattack.trainer import train


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=40)
    parser.add_argument("--p2", type=float, default=0.25)
    parser.add_argument("--p1", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    parser.add_argument("--model", nargs="+", default=["logistic"], choices=["logistic", "mlp"])
    args = parser.parse_args()

    print(f"{'model':>8} {'p1':>5} {'corrupt/epoch':>13} {'mean gain':>10} {'95% CI':>20} {'wins':>6}")
    for kind in args.model:
        for p1 in args.p1:
            base = desk_config(model_kind=kind, noise=NoiseSpec.symmetric(p1))
            gains = np.array([
                train(replace(base, master_seed=s, attack=AttackSpec(args.p2))).test_auc
                - train(replace(base, master_seed=s)).test_auc
                for s in range(args.seeds)
            ])
            lo, hi = stats.t.interval(0.95, len(gains) - 1, loc=gains.mean(), scale=stats.sem(gains))
            corrupt = scenario_probabilities(p1, args.p2).p_corrupt
            print(f"{kind:>8} {p1:>5.2f} {corrupt:>13.3f} {gains.mean():>+10.4f} "
                  f"[{lo:+.4f}, {hi:+.4f}] {int((gains > 0).sum()):>3}/{len(gains)}")


if __name__ == "__main__":
    main()
