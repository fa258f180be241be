"""Finite-population-corrected lottery uniformity tests, moment normality
tests, and Monte Carlo measurement of post-hoc test selection."""

from .distributions import (
    DegenerateSampleError,
    Density,
    DomainError,
    RngState,
    chi_squared_quantile,
    chi_squared_sf,
    kde_density,
    sample_student_t,
    std_normal_cdf,
    std_normal_quantile,
)
from .lottery import (
    CountVector,
    DrawHistory,
    DrawParseError,
    EmptySampleError,
    Game,
    LotteryConfig,
    counts_from_history,
    game_indicators,
    parse_draw_csv,
    parse_summary_csv,
    serialize_draw_csv,
    simulate_history,
)
from .normality import analytic_snoop_size, moment_stats, normality_tests
from .snoopsim import (
    EmpiricalDistribution,
    SimulationConfig,
    SizePowerTable,
    corrected_p_value,
    normality_size_power,
    simulate_zmin,
    size_distortion_table,
)
from .uniformity import NullModel, pearson_test, sample_chain_report, z_test_number

__version__ = "0.1.0"
