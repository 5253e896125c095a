"""Label-noise laboratory for binary classifiers.

Prior label corruption, transient per-epoch label attacks, the binomial
rule for choosing the attack probability, and AUC sweeps on clean test data.
"""

from .binom import BinomialDerivation, binomial_pmf, binomial_tail_ge, derive_p2, estimate_epoch_count
from .core import (
    DatasetSplit,
    LabeledExample,
    Purpose,
    RngStream,
    TrainingError,
    ValidationError,
    derive_stream,
    split_dataset,
)
from .noise import (
    AttackSpec,
    NoiseSpec,
    ScenarioCounts,
    ScenarioProbabilities,
    classify_scenarios,
    epoch_attack_labels,
    inject_prior_noise,
    scenario_probabilities,
)
from .trainer import TrainConfig, TrainReport, evaluate_checkpoint, train

__version__ = "0.1.0"
