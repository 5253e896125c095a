"""Binomial flip-count arithmetic used to pick the per-epoch attack probability.

An example attacked with probability ``p`` in each of ``n`` epochs is flipped
``k ~ Binomial(n, p)`` times. The attack probability is chosen so that the
mean flip count sits halfway between a lower anchor ``k1`` (usually 0, "never
flipped") and an upper anchor ``k2`` (usually n/2, "flipped in half the
epochs"), and the two tail risks are reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import ValidationError


@dataclass(frozen=True)
class BinomialParams:
    k: int
    n: int
    p: float

    def __post_init__(self):
        _check(self.k, self.n, self.p)


@dataclass(frozen=True)
class BinomialDerivation:
    k1: int
    k2: int
    n: int
    mu: float
    p2: float
    prob_never_flipped: float
    prob_majority_flipped: float
    # |B(k1) - B(k2)| at p2; the mean-matching rule only balances these approximately
    symmetry_residual: float


def _check(k: int, n: int, p: float) -> None:
    if n < 0:
        raise ValidationError(f"n must be non-negative, got {n}")
    if not 0 <= k <= n:
        raise ValidationError(f"k must lie in [0, n={n}], got {k}")
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValidationError(f"p must lie in [0, 1], got {p}")


def binomial_pmf(k: int, p: float, n: int) -> float:
    """P(K = k) for K ~ Binomial(n, p), accumulated in log space."""
    _check(k, n, p)
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    log_coef = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(log_coef + k * math.log(p) + (n - k) * math.log1p(-p))


def binomial_pmf_exact(k: int, p: Fraction | float, n: int) -> Fraction:
    """Exact rational pmf; slow reference for small n."""
    p = Fraction(p)
    return math.comb(n, k) * p**k * (1 - p) ** (n - k)


def binomial_tail_ge(k0: int, p: float, n: int) -> float:
    """P(K >= k0). Defined for 0 <= k0 <= n + 1."""
    if not 0 <= k0 <= n + 1:
        raise ValidationError(f"k0 must lie in [0, n + 1 = {n + 1}], got {k0}")
    _check(0, n, p)
    if k0 == 0:
        return 1.0
    if k0 == n + 1:
        return 0.0
    # sum the shorter side for accuracy
    if k0 > n // 2:
        total = math.fsum(binomial_pmf(k, p, n) for k in range(k0, n + 1))
    else:
        total = 1.0 - math.fsum(binomial_pmf(k, p, n) for k in range(0, k0))
    return min(1.0, max(0.0, total))


def derive_p2(k1: int = 0, k2: int = 9, n: int = 18) -> BinomialDerivation:
    """Attack probability whose mean flip count p2 * n is (k1 + k2) / 2."""
    if n < 1:
        raise ValidationError(f"epoch count n must be at least 1, got {n}")
    if not 0 <= k1 < k2 <= n:
        raise ValidationError(f"anchors must satisfy 0 <= k1 < k2 <= n, got k1={k1}, k2={k2}, n={n}")
    p2 = float(Fraction(k1 + k2, 2 * n))
    return BinomialDerivation(
        k1=k1,
        k2=k2,
        n=n,
        mu=p2 * n,
        p2=p2,
        prob_never_flipped=binomial_pmf(0, p2, n),
        prob_majority_flipped=binomial_tail_ge(math.ceil(n / 2), p2, n),
        symmetry_residual=abs(binomial_pmf(k1, p2, n) - binomial_pmf(k2, p2, n)),
    )


def estimate_epoch_count(past_run_lengths: Sequence[int]) -> int:
    """Mean run length rounded to the nearest integer, halves rounding up."""
    if len(past_run_lengths) == 0:
        raise ValidationError("need at least one past run length")
    if any(int(x) != x or x < 1 for x in past_run_lengths):
        raise ValidationError(f"run lengths must be positive integers, got {list(past_run_lengths)}")
    mean = Fraction(sum(int(x) for x in past_run_lengths), len(past_run_lengths))
    return math.floor(mean + Fraction(1, 2))
