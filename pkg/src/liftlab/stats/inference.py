from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

MIN_KS_SAMPLES = 30


@dataclass(frozen=True)
class EstimateCI:
    estimate: float
    low: float
    high: float
    count: int
    successes: int

    def overlaps(self, other: "EstimateCI") -> bool:
        return self.low <= other.high and other.low <= self.high

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "low": self.low, "high": self.high, "count": self.count}


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> EstimateCI:
    if trials < 1:
        raise ValueError("need at least one trial")
    ci = sps.binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return EstimateCI(successes / trials, float(ci.low), float(ci.high), trials, successes)


def nonincreasing_within_ci(estimates: Sequence[EstimateCI]) -> bool:
    """True unless some later estimate is significantly above an earlier one."""
    return all(
        later.estimate <= earlier.estimate or later.overlaps(earlier)
        for i, earlier in enumerate(estimates)
        for later in estimates[i + 1 :]
    )


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float


def ks_test(samples, cdf: Callable) -> KSResult:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < MIN_KS_SAMPLES:
        raise ValueError(f"need at least {MIN_KS_SAMPLES} samples, got {samples.size}")
    res = sps.kstest(samples, cdf, method="asymp")
    return KSResult(float(res.statistic), float(res.pvalue))


def harmonic(h: int) -> float:
    return float(np.sum(1.0 / np.arange(1, h + 1)))


def cycle_count_variance(h: int) -> float:
    """Variance of the number of cycles of a uniform permutation of h points."""
    i = np.arange(1, h + 1, dtype=float)
    return float(np.sum(1.0 / i - 1.0 / i**2))
