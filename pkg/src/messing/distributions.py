"""Probability kernel: normal and chi-squared CDFs/quantiles, random streams,
Student-t sampling, urn draws without replacement and Gaussian KDE.

The special functions are scalar and written against :mod:`math` only, so
they can serve as critical-value oracles for the vectorised simulation code.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "DegenerateSampleError",
    "RngState",
    "Density",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_quantile",
    "chi_squared_sf",
    "chi_squared_cdf",
    "chi_squared_quantile",
    "sample_student_t",
    "draw_without_replacement",
    "silverman_bandwidth",
    "kde_density",
]

_SQRT2 = math.sqrt(2.0)
_MASK64 = (1 << 64) - 1


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class DegenerateSampleError(ValueError):
    """Sample without spread (constant values) where spread is required."""


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RngState:
    """Seed plus stream selector for a Philox4x64 counter-based generator.

    The 128-bit Philox key is ``seed | stream_id << 64`` so every
    ``(seed, stream_id)`` pair names its own keyed stream. Within a stream,
    ``substream`` sets the top 64-bit word of the 256-bit counter, which
    splits it into non-overlapping blocks of 2**192 counter values.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= int(value) <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self, substream: int = 0) -> np.random.Generator:
        """Fresh generator positioned at the start of ``substream``."""
        if not 0 <= substream <= _MASK64:
            raise DomainError(f"substream must be an unsigned 64-bit integer, got {substream}")
        key = int(self.seed) | (int(self.stream_id) << 64)
        counter = int(substream) << 192
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def with_stream(self, stream_id: int) -> "RngState":
        return RngState(self.seed, stream_id)


# ---------------------------------------------------------------------------
# normal distribution
# ---------------------------------------------------------------------------


def _check_finite(x: float, name: str = "z") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def std_normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def std_normal_cdf(z: float) -> float:
    """Phi(z) = erfc(-z / sqrt 2) / 2.

    ``math.erfc`` keeps full relative precision in the lower tail, so left
    p-values around 1e-3 (and far smaller) carry all their digits.
    """
    z = _check_finite(z)
    return 0.5 * math.erfc(-z / _SQRT2)


def _bracketed_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    x0: float,
    xtol: float = 1e-14,
    maxiter: int = 200,
) -> float:
    """Root of an increasing ``f`` on ``[lo, hi]``.

    Newton steps that leave the bracket (or a zero derivative) fall back to
    bisection; the bracket shrinks every iteration so convergence is certain.
    """
    x = min(max(x0, lo), hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            lo = x
        else:
            hi = x
        d = fprime(x)
        step_ok = d > 0.0 and math.isfinite(d)
        x_new = x - fx / d if step_ok else 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= xtol * max(1.0, abs(x_new)) or hi - lo <= xtol * max(1.0, abs(hi)):
            return x_new
        x = x_new
    return x


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` for ``0 < p < 1``."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    # Work in the lower tail where the CDF has full relative precision.
    q = min(p, 1.0 - p)
    # Starting point: rational tail approximation (Abramowitz & Stegun 26.2.23).
    t = math.sqrt(-2.0 * math.log(q))
    x0 = -(t - (2.515517 + 0.802853 * t + 0.010328 * t * t) / (1 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t**3))
    z = _bracketed_newton(
        lambda x: (std_normal_cdf(x) - q) / q,
        lambda x: std_normal_pdf(x) / q,
        -40.0,
        0.0,
        x0,
    )
    return z if p < 0.5 else -z


# ---------------------------------------------------------------------------
# chi-squared distribution
# ---------------------------------------------------------------------------

_GAMMA_EPS = 1e-16
_GAMMA_MAXITER = 10_000
_TINY = 1e-300


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized P(a, x) by the power series; use for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_GAMMA_MAXITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized Q(a, x) by the Legendre continued fraction (modified Lentz)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAXITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _check_chi2_args(x: float, df: int) -> tuple[float, int]:
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"x must be non-negative, got {x}")
    if int(df) != df or df < 1:
        raise DomainError(f"df must be a positive integer, got {df}")
    return x, int(df)


def chi_squared_sf(x: float, df: int) -> float:
    """Upper tail P(X > x) for X ~ chi-squared(df)."""
    x, df = _check_chi2_args(x, df)
    a, y = 0.5 * df, 0.5 * x
    if y == 0.0:
        return 1.0
    if math.isinf(y):
        return 0.0
    if y < a + 1.0:
        return max(0.0, 1.0 - _lower_gamma_series(a, y))
    return min(1.0, _upper_gamma_cf(a, y))


def chi_squared_cdf(x: float, df: int) -> float:
    x, df = _check_chi2_args(x, df)
    a, y = 0.5 * df, 0.5 * x
    if y == 0.0:
        return 0.0
    if math.isinf(y):
        return 1.0
    if y < a + 1.0:
        return min(1.0, _lower_gamma_series(a, y))
    return max(0.0, 1.0 - _upper_gamma_cf(a, y))


def _chi_squared_pdf(x: float, df: int) -> float:
    if x <= 0.0:
        return 0.0
    a = 0.5 * df
    return math.exp((a - 1.0) * math.log(x) - 0.5 * x - a * math.log(2.0) - math.lgamma(a))


def chi_squared_quantile(p: float, df: int) -> float:
    """Value ``x`` with ``P(X <= x) = p`` for X ~ chi-squared(df)."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if int(df) != df or df < 1:
        raise DomainError(f"df must be a positive integer, got {df}")
    df = int(df)
    hi = max(1.0, 2.0 * df)
    while chi_squared_sf(hi, df) > 1.0 - p:
        hi *= 2.0
    # Wilson-Hilferty start.
    z = std_normal_quantile(p)
    c = 2.0 / (9.0 * df)
    x0 = max(df * (1.0 - c + z * math.sqrt(c)) ** 3, 1e-8)
    if p < 0.5:
        f = lambda x: chi_squared_cdf(x, df) - p  # noqa: E731
    else:
        f = lambda x: (1.0 - p) - chi_squared_sf(x, df)  # noqa: E731
    return _bracketed_newton(f, lambda x: _chi_squared_pdf(x, df), 0.0, hi, x0)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample_student_t(df: int, rng: RngState, size: int | tuple[int, ...] | None = None):
    """Student-t draws as N(0,1) / sqrt(chi2(df) / df).

    Numerator and denominator come from substreams 0 and 1 of ``rng``, so
    repeated calls with the same state give the same values.
    """
    if int(df) != df or df < 1:
        raise DomainError(f"df must be a positive integer, got {df}")
    z = rng.generator(0).standard_normal(size)
    w = rng.generator(1).chisquare(df, size)
    return z / np.sqrt(w / df)


def draw_without_replacement(
    pool_size: int, draw_size: int, games: int, gen: np.random.Generator
) -> np.ndarray:
    """``games`` independent urn draws of ``draw_size`` balls from 1..pool_size.

    Returns an int array of shape ``(games, draw_size)`` whose rows hold the
    balls in drawing order. Each row is the head of a partial Fisher-Yates
    shuffle, hence uniform over ordered draws and over subsets.
    """
    if not 1 <= draw_size <= pool_size:
        raise DomainError(f"need 1 <= draw_size <= pool_size, got {draw_size}, {pool_size}")
    urn = np.tile(np.arange(1, pool_size + 1, dtype=np.int16 if pool_size < 2**15 else np.int64), (games, 1))
    rows = np.arange(games)
    for i in range(draw_size):
        j = gen.integers(i, pool_size, size=games)
        picked = urn[rows, j]
        urn[rows, j] = urn[:, i]
        urn[:, i] = picked
    return np.ascontiguousarray(urn[:, :draw_size], dtype=np.int64)


# ---------------------------------------------------------------------------
# kernel density
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Density:
    grid: np.ndarray
    values: np.ndarray
    bandwidth: float = float("nan")

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("grid,value\n")
        for g, v in zip(self.grid, self.values):
            buf.write(f"{g:.6g},{v:.6g}\n")
        return buf.getvalue()


def silverman_bandwidth(samples: Sequence[float]) -> float:
    """0.9 * min(sd, IQR / 1.34) * n ** (-1/5)."""
    x = np.asarray(samples, dtype=float)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0.0:
        spread = sd
    return 0.9 * spread * x.size ** (-0.2)


def kde_density(
    samples: Sequence[float],
    grid: Sequence[float],
    bandwidth: float | Callable[[np.ndarray], float] | None = None,
) -> Density:
    """Gaussian kernel density estimate of ``samples`` evaluated on ``grid``.

    ``bandwidth`` may be a number, a rule taking the sample, or None for
    Silverman's rule of thumb.
    """
    x = np.asarray(samples, dtype=float).ravel()
    g = np.asarray(grid, dtype=float).ravel()
    if x.size < 2 or np.ptp(x) == 0.0:
        raise DegenerateSampleError("kernel density needs at least two distinct samples")
    if g.size > 1 and np.any(np.diff(g) <= 0):
        raise DomainError("grid must be strictly ascending")
    if bandwidth is None:
        h = silverman_bandwidth(x)
    elif callable(bandwidth):
        h = float(bandwidth(x))
    else:
        h = float(bandwidth)
    if not h > 0.0:
        raise DomainError(f"bandwidth must be positive, got {h}")

    values = np.zeros_like(g)
    chunk = max(1, 2_000_000 // max(g.size, 1))
    for start in range(0, x.size, chunk):
        u = (g[:, None] - x[None, start : start + chunk]) / h
        values += np.exp(-0.5 * u * u).sum(axis=1)
    values /= x.size * h * math.sqrt(2.0 * math.pi)
    return Density(grid=g, values=values, bandwidth=h)
