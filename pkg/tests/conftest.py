from pathlib import Path

import pytest

from messing.lottery import LotteryConfig
from messing.snoopsim import DEFAULT_SEED, SimulationConfig, normality_size_power, simulate_null_counts, simulate_zmin

DATA = Path(__file__).resolve().parents[1] / "data"

# V=49, K=6, N=1000 histories used by the calibration properties.
CALIBRATION_LOTTERY = LotteryConfig(49, 6, 1000)
CALIBRATION_REPLICATIONS = 10_000


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def calibration_counts():
    return simulate_null_counts(CALIBRATION_LOTTERY, CALIBRATION_REPLICATIONS, seed=DEFAULT_SEED)


@pytest.fixture(scope="session")
def zmin_published():
    """Z_min null distribution at the published configuration (R = N = 1e4)."""
    return simulate_zmin(SimulationConfig(replications=10_000, lottery=LotteryConfig(49, 6, 10_000)))


@pytest.fixture(scope="session")
def table2_desk():
    return normality_size_power(SimulationConfig(replications=100_000, sample_size=1000, alternative="t(10)"), 0.05)
