"""Monte Carlo studies of post-hoc test selection.

Two studies live here: the null distribution of the standardized minimum
lottery count (what testing the least frequent number really tests), and
the size/power of skewness, kurtosis, Jarque-Bera and the max/min
selection strategies.

Replication ``r`` always draws from ``RngState(seed, r)``, and blocks of
replications are reassembled in index order, so results do not depend on
how many worker processes ran them.
"""

from __future__ import annotations

import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .distributions import (
    Density,
    DomainError,
    RngState,
    kde_density,
    sample_student_t,
    silverman_bandwidth,
    std_normal_quantile,
)
from .lottery import LotteryConfig, simulate_counts
from .normality import MIN_SAMPLE_SIZE, STATISTICS, gamma_statistics, rejections

__all__ = [
    "DEFAULT_SEED",
    "MIN_REPLICATIONS",
    "SimulationConfig",
    "EmpiricalDistribution",
    "SizePowerTable",
    "parse_alternative",
    "mc_standard_error",
    "simulate_null_counts",
    "simulate_zmin",
    "corrected_p_value",
    "size_distortion_table",
    "distortion_to_csv",
    "simulate_gamma_statistics",
    "normality_size_power",
]

DEFAULT_SEED = 20191129
MIN_REPLICATIONS = 1000
_SIZE_SUBSTREAM = 2
_NULL_POWER_SUBSTREAM = 3
_BLOCK_VALUES = 2_000_000  # floats materialised per block in the normality study


def parse_alternative(text: str) -> int | None:
    """``"gaussian"`` -> None; ``"t(10)"``, ``"t10"``, ``"student_t(10)"`` -> 10."""
    s = text.strip().lower().replace(" ", "")
    if s in ("gaussian", "normal"):
        return None
    m = re.fullmatch(r"(?:student_?)?t\(?(\d+)\)?", s)
    if not m or int(m.group(1)) < 1:
        raise DomainError(f"alternative must be 'gaussian' or 't(df)', got {text!r}")
    return int(m.group(1))


@dataclass(frozen=True)
class SimulationConfig:
    replications: int = 10_000
    seed: int = DEFAULT_SEED
    lottery: LotteryConfig = field(default_factory=lambda: LotteryConfig(49, 6, 10_000))
    sample_size: int = 1000
    alternative: str = "t(10)"

    def __post_init__(self) -> None:
        if self.replications < MIN_REPLICATIONS:
            raise DomainError(f"replications must be >= {MIN_REPLICATIONS}, got {self.replications}")
        if self.sample_size < MIN_SAMPLE_SIZE:
            raise DomainError(f"sample_size must be >= {MIN_SAMPLE_SIZE}, got {self.sample_size}")
        RngState(self.seed)
        parse_alternative(self.alternative)

    @property
    def t_df(self) -> int | None:
        return parse_alternative(self.alternative)

    def to_dict(self) -> dict:
        return asdict(self)


def mc_standard_error(p: float, replications: int) -> float:
    return math.sqrt(p * (1.0 - p) / replications)


class EmpiricalDistribution:
    """Sorted Monte Carlo sample with ECDF, quantile and density queries."""

    def __init__(self, values: Iterable[float]):
        v = np.sort(np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float))
        if v.size == 0:
            raise DomainError("empirical distribution needs at least one value")
        v.setflags(write=False)
        self.sorted_values = v

    def __len__(self) -> int:
        return int(self.sorted_values.size)

    def ecdf(self, z):
        """Fraction of values <= z."""
        out = np.searchsorted(self.sorted_values, z, side="right") / self.sorted_values.size
        return float(out) if np.ndim(out) == 0 else out

    def quantile(self, p: float) -> float:
        """Smallest sample value whose ECDF reaches ``p``."""
        if not 0.0 < p <= 1.0:
            raise DomainError(f"p must lie in (0, 1], got {p}")
        r = self.sorted_values.size
        return float(self.sorted_values[max(math.ceil(p * r - 1e-9), 1) - 1])

    def standard_error(self, p: float) -> float:
        return mc_standard_error(p, len(self))

    def default_grid(self, points: int = 512, bandwidth: float | None = None) -> np.ndarray:
        h = silverman_bandwidth(self.sorted_values) if bandwidth is None else bandwidth
        return np.linspace(self.sorted_values[0] - 3 * h, self.sorted_values[-1] + 3 * h, points)

    def density(self, grid: Sequence[float] | None = None, bandwidth: float | None = None) -> Density:
        if grid is None:
            grid = self.default_grid(bandwidth=bandwidth)
        return kde_density(self.sorted_values, grid, bandwidth)

    def to_csv(self) -> str:
        return "value\n" + "".join(f"{x!r}\n" for x in self.sorted_values.tolist())


# ---------------------------------------------------------------------------
# parallel plumbing
# ---------------------------------------------------------------------------


def _blocks(total: int, size: int) -> list[tuple[int, int]]:
    return [(i, min(i + size, total)) for i in range(0, total, size)]


def _map_blocks(fn: Callable, args: tuple, total: int, block: int, workers: int) -> list:
    spans = _blocks(total, block)
    if workers <= 1 or len(spans) == 1:
        return [fn(*args, lo, hi) for lo, hi in spans]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args, lo, hi) for lo, hi in spans]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# minimum-count study
# ---------------------------------------------------------------------------


def _count_block(lottery: LotteryConfig, seed: int, lo: int, hi: int) -> np.ndarray:
    out = np.empty((hi - lo, lottery.pool_size), dtype=np.int64)
    for i, r in enumerate(range(lo, hi)):
        out[i] = simulate_counts(lottery, RngState(seed, r))
    return out


def simulate_null_counts(
    lottery: LotteryConfig, replications: int, seed: int = DEFAULT_SEED, workers: int = 1
) -> np.ndarray:
    """Sample-I count vectors of ``replications`` uniform histories, shape (R, V)."""
    block = max(1, min(1000, replications // max(workers, 1) or 1))
    parts = _map_blocks(_count_block, (lottery, seed), replications, block, workers)
    return np.concatenate(parts, axis=0)


def standardized_minimum(counts: np.ndarray, lottery: LotteryConfig) -> np.ndarray:
    """(min_m S_m - n/V) / sigma_K row-wise."""
    v, k, n = lottery.pool_size, lottery.draw_size, lottery.n
    sigma_k = math.sqrt(n * (v - k) / v**2)
    return (v * counts.min(axis=1) - n) / v / sigma_k


def simulate_zmin(config: SimulationConfig, workers: int = 1) -> EmpiricalDistribution:
    counts = simulate_null_counts(config.lottery, config.replications, config.seed, workers)
    return EmpiricalDistribution(standardized_minimum(counts, config.lottery))


def corrected_p_value(dist: EmpiricalDistribution, z_observed: float) -> float:
    """Left-tail probability of the simulated minimum statistic at ``z_observed``."""
    if dist is None or len(dist) == 0:
        raise DomainError("empty distribution")
    if math.isnan(z_observed):
        raise DomainError("z_observed is NaN")
    return dist.ecdf(z_observed)


def size_distortion_table(dist: EmpiricalDistribution, alphas: Sequence[float]) -> dict[float, float]:
    """Actual rejection rate of the nominal level-alpha left test when the
    tested number is the least frequent one."""
    if len(dist) == 0:
        raise DomainError("empty distribution")
    out = {}
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {a}")
        out[a] = dist.ecdf(std_normal_quantile(a))
    return out


def distortion_to_csv(table: dict[float, float], replications: int) -> str:
    buf = io.StringIO()
    buf.write("alpha,critical_value,rejection_rate,mc_se,inflation\n")
    for a, p in table.items():
        z = std_normal_quantile(a)
        buf.write(f"{a:.6g},{z:.6g},{p:.6g},{mc_standard_error(p, replications):.6g},{p / a:.6g}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# normality-test study
# ---------------------------------------------------------------------------


def _gamma_block(
    n: int, t_df: int | None, substream: int, seed: int, lo: int, hi: int
) -> tuple[np.ndarray, np.ndarray]:
    x = np.empty((hi - lo, n))
    for i, r in enumerate(range(lo, hi)):
        state = RngState(seed, r)
        if t_df is None:
            x[i] = state.generator(substream).standard_normal(n)
        else:
            x[i] = sample_student_t(t_df, state, n)
    return gamma_statistics(x)


def simulate_gamma_statistics(
    sample_size: int,
    replications: int,
    t_df: int | None,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    substream: int = _SIZE_SUBSTREAM,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-replication (Gamma_1^2, Gamma_2^2).

    Gaussian data when ``t_df`` is None, drawn from ``substream`` of each
    replication's state; Student-t data use substreams 0 and 1.
    """
    block = max(1, min(_BLOCK_VALUES // sample_size, -(-replications // max(workers, 1))))
    parts = _map_blocks(_gamma_block, (sample_size, t_df, substream, seed), replications, block, workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


@dataclass(frozen=True)
class SizePowerTable:
    size: dict[str, float]
    power: dict[str, float]
    replications: int
    sample_size: int
    alpha: float
    alternative: str
    seed: int

    def size_se(self, stat: str) -> float:
        return mc_standard_error(self.size[stat], self.replications)

    def power_se(self, stat: str) -> float:
        return mc_standard_error(self.power[stat], self.replications)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("test statistic," + ",".join(STATISTICS) + "\n")
        buf.write("size," + ",".join(f"{self.size[s]:.6g}" for s in STATISTICS) + "\n")
        buf.write("power," + ",".join(f"{self.power[s]:.6g}" for s in STATISTICS) + "\n")
        buf.write("size_se," + ",".join(f"{self.size_se(s):.6g}" for s in STATISTICS) + "\n")
        buf.write("power_se," + ",".join(f"{self.power_se(s):.6g}" for s in STATISTICS) + "\n")
        return buf.getvalue()

    def to_table(self) -> str:
        names = ("Gamma1^2", "Gamma2^2", "JB", "Gamma_max^2", "Gamma_min^2")
        lines = [
            f"{'test statistic':<16}" + "".join(f"{n:>13}" for n in names),
            f"{'size':<16}" + "".join(f"{self.size[s]:>13.4f}" for s in STATISTICS),
            f"{'power':<16}" + "".join(f"{self.power[s]:>13.4f}" for s in STATISTICS),
            f"(alpha={self.alpha}, n={self.sample_size}, R={self.replications}, "
            f"alternative={self.alternative}, max MC s.e.={max(self.size_se(s) for s in STATISTICS):.4f}/"
            f"{max(self.power_se(s) for s in STATISTICS):.4f})",
        ]
        return "\n".join(lines) + "\n"


def _rates(g1: np.ndarray, g2: np.ndarray, alpha: float) -> dict[str, float]:
    return {k: float(np.mean(v)) for k, v in rejections(g1, g2, alpha).items()}


def normality_size_power(config: SimulationConfig, alpha: float = 0.05, workers: int = 1) -> SizePowerTable:
    """Rejection rates under Gaussian data (size) and under the configured
    alternative (power), on ``config.replications`` samples each."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    n, r = config.sample_size, config.replications
    size = _rates(*simulate_gamma_statistics(n, r, None, config.seed, workers), alpha)
    power_stats = simulate_gamma_statistics(n, r, config.t_df, config.seed, workers, _NULL_POWER_SUBSTREAM)
    power = _rates(*power_stats, alpha)
    return SizePowerTable(
        size=size,
        power=power,
        replications=r,
        sample_size=n,
        alpha=alpha,
        alternative=config.alternative,
        seed=config.seed,
    )
