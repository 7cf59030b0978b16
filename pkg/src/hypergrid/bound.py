"""Analytic ceiling on how often greedy downward selection can mis-rank.

For probabilities p1..pn with sum S <= 1 and product P, the volume of
{x in [0,1]^n : sum(x) < S and prod(x) > P} is at most the slab between the
hyperplanes sum(x) = P**(1/n) and sum(x) = S, giving the bound

    (S**n - P) / n!

The equal-probability configuration at S = 1 gives the reference sequence
(1 - n**-n) / n!, which drops below 1e-8 by n = 12.  A seeded Monte Carlo
estimator of the true region rate is provided for spot checks; the estimate
plus three standard errors never exceeds the analytic bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundError

# Exact integer factorials stay reasonable up to 20!; beyond that the bound
# is computed through log-gamma.
_EXACT_FACTORIAL_LIMIT = 20
_SUM_TOLERANCE = 1e-9
_MC_CHUNK = 1 << 18


@dataclass(frozen=True)
class MonteCarloEstimate:
    samples: int
    hits: int
    rate: float
    std_error: float
    seed: int


@dataclass(frozen=True)
class BoundReport:
    n: int
    prob_sum: float
    prob_product: float
    value: float
    worst_case: float
    mc: MonteCarloEstimate | None = None


def suboptimality_bound(probs: Sequence[float] | Iterable[float]) -> BoundReport:
    """Bound report for a list of probabilities with sum at most 1.

    Sums above 1 are rejected: the simplex-corner volume S**n / n! that the
    derivation rests on only holds for S <= 1.
    """
    values = [float(p) for p in probs]
    if not values:
        raise BoundError("need at least one probability")
    for p in values:
        if not 0.0 < p <= 1.0:
            raise BoundError(f"probabilities must lie in (0, 1], got {p}")
    s = math.fsum(values)
    if s > 1.0 + _SUM_TOLERANCE:
        raise BoundError(f"probabilities sum to {s}, above 1; the bound does not apply")
    product = 1.0
    for p in values:
        product *= p
    n = len(values)
    return BoundReport(
        n=n,
        prob_sum=s,
        prob_product=product,
        value=_bound_value(s, product, n),
        worst_case=worst_case_bound(n),
    )


def worst_case_bound(n: int) -> float:
    """(1 - n**-n) / n!, the bound at n equal probabilities summing to 1."""
    if n < 1:
        raise BoundError(f"n must be >= 1, got {n}")
    return _bound_value(1.0, float(n) ** (-n), n)


def limit_check(max_n: int) -> list[tuple[int, float]]:
    """The reference sequence (n, worst_case_bound(n)) for n = 2..max_n."""
    if max_n < 2:
        raise BoundError(f"max_n must be >= 2, got {max_n}")
    return [(n, worst_case_bound(n)) for n in range(2, max_n + 1)]


def monte_carlo_region_rate(
    prob_sum: float, prob_product: float, n: int, samples: int, seed: int
) -> MonteCarloEstimate:
    """Fraction of uniform points in [0,1]^n with sum < prob_sum and
    product > prob_product.

    Deterministic for a fixed seed: one PCG64 stream consumed in fixed-size
    chunks.  std_error is sqrt(rate * (1 - rate) / samples).
    """
    if n < 1:
        raise BoundError(f"n must be >= 1, got {n}")
    if samples < 1:
        raise BoundError(f"samples must be >= 1, got {samples}")
    if not 0.0 < prob_product < prob_sum:
        raise BoundError(
            f"need 0 < P < S, got P={prob_product}, S={prob_sum}"
        )
    if prob_sum > 1.0 + _SUM_TOLERANCE:
        raise BoundError(f"S must be at most 1, got {prob_sum}")
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    left = samples
    while left:
        take = min(left, _MC_CHUNK)
        pts = rng.random((take, n))
        inside = (pts.sum(axis=1) < prob_sum) & (pts.prod(axis=1) > prob_product)
        hits += int(np.count_nonzero(inside))
        left -= take
    rate = hits / samples
    std_error = math.sqrt(rate * (1.0 - rate) / samples)
    return MonteCarloEstimate(
        samples=samples, hits=hits, rate=rate, std_error=std_error, seed=seed
    )


def with_monte_carlo(report: BoundReport, samples: int, seed: int) -> BoundReport:
    """Attach a Monte Carlo estimate of the region rate to a bound report."""
    mc = monte_carlo_region_rate(report.prob_sum, report.prob_product, report.n, samples, seed)
    return replace(report, mc=mc)


def simplex_volume(s: float, n: int) -> float:
    """Volume of {x in [0,1]^n : sum(x) < s} for s <= 1, which is s**n / n!."""
    if n < 1:
        raise BoundError(f"n must be >= 1, got {n}")
    if not 0.0 <= s <= 1.0:
        raise BoundError(f"s must lie in [0, 1], got {s}")
    return _scaled_by_inverse_factorial(s**n, n)


def _bound_value(s: float, product: float, n: int) -> float:
    diff = s**n - product
    if diff <= 0.0:
        return 0.0
    return _scaled_by_inverse_factorial(diff, n)


def _scaled_by_inverse_factorial(value: float, n: int) -> float:
    if value == 0.0:
        return 0.0
    if n <= _EXACT_FACTORIAL_LIMIT:
        return value / math.factorial(n)
    return math.exp(math.log(value) - math.lgamma(n + 1))
