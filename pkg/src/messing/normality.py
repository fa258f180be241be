"""Skewness, kurtosis and Jarque-Bera normality tests, and the max/min
selection strategies that pick whichever moment test suits the analyst."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .distributions import DegenerateSampleError, DomainError, chi_squared_quantile, chi_squared_sf

__all__ = [
    "MomentStats",
    "NormalityResult",
    "SnoopSizes",
    "STATISTICS",
    "moment_stats",
    "normality_tests",
    "gamma_from_moments",
    "gamma_statistics",
    "rejections",
    "analytic_snoop_size",
]

# Column order used by every table: skewness, kurtosis, JB, max, min.
STATISTICS = ("gamma1_sq", "gamma2_sq", "jb", "gamma_max_sq", "gamma_min_sq")
MIN_SAMPLE_SIZE = 4


@dataclass(frozen=True)
class MomentStats:
    n: int
    mean: float
    d: float
    skew: float
    kurt: float


@dataclass(frozen=True)
class NormalityResult:
    n: int
    gamma1_sq: float
    gamma2_sq: float
    jb: float
    selected: Literal["skew", "kurt"]
    gamma_max_sq: float
    gamma_min_sq: float
    p_values: dict[str, float]
    rejected: dict[str, bool]
    alpha: float


@dataclass(frozen=True)
class SnoopSizes:
    size_max: float
    size_min: float


def moment_stats(x: Sequence[float]) -> MomentStats:
    """Sample mean, root mean squared deviation ``d`` and the standardized
    third and fourth central moments, all with divisor n.

    Accepts n >= 3 so small hand-checkable samples work; the tests
    themselves require n >= 4.
    """
    a = np.asarray(x, dtype=float).ravel()
    if a.size < 3:
        raise DomainError(f"need at least 3 observations, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise DomainError("sample contains non-finite values")
    mean = float(a.mean())
    dev = a - mean
    m2 = float(np.mean(dev**2))
    if m2 == 0.0 or np.ptp(a) == 0.0:
        raise DegenerateSampleError("constant sample has no skewness or kurtosis")
    m3 = float(np.mean(dev**3))
    m4 = float(np.mean(dev**4))
    return MomentStats(n=a.size, mean=mean, d=float(np.sqrt(m2)), skew=m3 / m2**1.5, kurt=m4 / m2**2)


def _check_alpha(alpha: float, closed: bool = False) -> float:
    alpha = float(alpha)
    ok = 0.0 <= alpha <= 1.0 if closed else 0.0 < alpha < 1.0
    if not ok:
        raise DomainError(f"alpha must lie in {'[0, 1]' if closed else '(0, 1)'}, got {alpha}")
    return alpha


def gamma_from_moments(n: int, skew: float, kurt: float) -> tuple[float, float]:
    """(n skew^2 / 6, n (kurt - 3)^2 / 24)."""
    return n * skew**2 / 6.0, n * (kurt - 3.0) ** 2 / 24.0


def selected_moment(gamma1_sq: float, gamma2_sq: float) -> Literal["skew", "kurt"]:
    """Moment behind Gamma_max^2; exact ties go to skewness."""
    return "skew" if gamma1_sq >= gamma2_sq else "kurt"


def normality_tests(x: Sequence[float], alpha: float = 0.05) -> NormalityResult:
    """Gamma_1^2 = n skew^2 / 6, Gamma_2^2 = n (kurt - 3)^2 / 24, JB = sum.

    Gamma_max^2 and Gamma_min^2 carry the naive chi-squared(1) p-value, the
    one an analyst who chose the test after looking would report.
    """
    alpha = _check_alpha(alpha)
    a = np.asarray(x, dtype=float).ravel()
    if a.size < MIN_SAMPLE_SIZE:
        raise DomainError(f"need at least {MIN_SAMPLE_SIZE} observations, got {a.size}")
    ms = moment_stats(a)
    g1, g2 = gamma_from_moments(ms.n, ms.skew, ms.kurt)
    stats = {
        "gamma1_sq": g1,
        "gamma2_sq": g2,
        "jb": g1 + g2,
        "gamma_max_sq": max(g1, g2),
        "gamma_min_sq": min(g1, g2),
    }
    p_values = {k: chi_squared_sf(v, 2 if k == "jb" else 1) for k, v in stats.items()}
    crit1 = chi_squared_quantile(1.0 - alpha, 1)
    crit2 = chi_squared_quantile(1.0 - alpha, 2)
    rejected = {k: v > (crit2 if k == "jb" else crit1) for k, v in stats.items()}
    return NormalityResult(
        n=ms.n,
        gamma1_sq=g1,
        gamma2_sq=g2,
        jb=stats["jb"],
        selected=selected_moment(g1, g2),
        gamma_max_sq=stats["gamma_max_sq"],
        gamma_min_sq=stats["gamma_min_sq"],
        p_values=p_values,
        rejected=rejected,
        alpha=alpha,
    )


def gamma_statistics(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise Gamma_1^2 and Gamma_2^2 for a (replications, n) array."""
    x = np.asarray(samples, dtype=float)
    n = x.shape[1]
    dev = x - x.mean(axis=1, keepdims=True)
    sq = dev * dev
    m2 = sq.mean(axis=1)
    m3 = (sq * dev).mean(axis=1)
    m4 = (sq * sq).mean(axis=1)
    return gamma_from_moments(n, m3 / m2**1.5, m4 / (m2 * m2))


def rejections(g1: np.ndarray, g2: np.ndarray, alpha: float) -> dict[str, np.ndarray]:
    """Boolean rejection indicators per statistic at level ``alpha``."""
    crit1 = chi_squared_quantile(1.0 - alpha, 1)
    crit2 = chi_squared_quantile(1.0 - alpha, 2)
    return {
        "gamma1_sq": g1 > crit1,
        "gamma2_sq": g2 > crit1,
        "jb": g1 + g2 > crit2,
        "gamma_max_sq": np.maximum(g1, g2) > crit1,
        "gamma_min_sq": np.minimum(g1, g2) > crit1,
    }


def analytic_snoop_size(alpha: float) -> SnoopSizes:
    """Sizes of the max and min strategies when the two moment tests are
    independent with exact level alpha: 2 alpha - alpha^2 and alpha^2."""
    alpha = _check_alpha(alpha, closed=True)
    return SnoopSizes(size_max=2 * alpha - alpha * alpha, size_min=alpha * alpha)
