"""Binomial rates with confidence intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats

# Below this many successes (or failures) the normal approximation is
# replaced by the exact Clopper-Pearson interval.
EXACT_THRESHOLD = 30


def binomial_ci(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n <= 0:
        return 0.0, 1.0
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    alpha = 1 - level
    if min(k, n - k) < EXACT_THRESHOLD:
        lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
        hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
        return lo, hi
    p = k / n
    half = float(stats.norm.ppf(1 - alpha / 2)) * math.sqrt(p * (1 - p) / n)
    return max(0.0, p - half), min(1.0, p + half)


@dataclass(frozen=True)
class Rate:
    successes: int
    trials: int

    @property
    def value(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        if not self.trials:
            return 0.0
        p = self.value
        return math.sqrt(p * (1 - p) / self.trials)

    def ci(self, level: float = 0.95) -> tuple[float, float]:
        return binomial_ci(self.successes, self.trials, level)

    def contains(self, p: float, level: float = 0.95) -> bool:
        lo, hi = self.ci(level)
        return lo <= p <= hi

    def __add__(self, other: "Rate") -> "Rate":
        return Rate(self.successes + other.successes, self.trials + other.trials)

    def as_dict(self) -> dict:
        lo95, hi95 = self.ci(0.95)
        lo99, hi99 = self.ci(0.99)
        return {
            "successes": self.successes,
            "trials": self.trials,
            "rate": self.value,
            "ci95": [lo95, hi95],
            "ci99": [lo99, hi99],
        }
