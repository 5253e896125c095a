"""Pick the synthetic class separation so the clean baseline lands near AUC 0.92.

For unit-variance Gaussians with means +/- s/2 on one axis, the Bayes-optimal
AUC is Phi(s / sqrt(2)). The script prints that next to the trained clean
logistic baseline, averaged over seeds, for a grid of separations.

    python scripts/calibrate_separation.py --seeds 10
"""

import argparse
import math
from dataclasses import replace

import numpy as np
from scipy.stats import norm

from labelattack.data import SyntheticConfig
from labelattack.experiment import desk_config
from labelattack.trainer import train


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--grid", type=float, nargs="+", default=[1.5, 1.75, 2.0, 2.25, 2.5, 3.0])
    args = parser.parse_args()

    print(f"{'separation':>10} {'bayes_auc':>10} {'trained':>10} {'std':>8}")
    for sep in args.grid:
        cfg = desk_config(synthetic=SyntheticConfig(class_separation=sep))
        aucs = [train(replace(cfg, master_seed=s)).test_auc for s in range(args.seeds)]
        bayes = norm.cdf(sep / math.sqrt(2))
        print(f"{sep:>10.2f} {bayes:>10.4f} {np.mean(aucs):>10.4f} {np.std(aucs, ddof=1):>8.4f}")


if __name__ == "__main__":
    main()
