"""Single-number binomial tests and Pearson uniformity tests for K-out-of-V
draws, with the finite-population variance correction."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Literal

from .distributions import DomainError, chi_squared_sf, std_normal_cdf
from .lottery import CountVector, DrawHistory, counts_from_history

__all__ = [
    "Side",
    "NullModel",
    "ZTestResult",
    "ChiSqTestResult",
    "PValueInterval",
    "SampleRow",
    "ChainReport",
    "z_test_number",
    "pearson_test",
    "sample_chain_report",
    "normal_p_value",
]

Side = Literal["left", "right", "two-sided"]
_SIDES = ("left", "right", "two-sided")


@dataclass(frozen=True)
class NullModel:
    """Uniform null for ``n`` draws from a pool of ``pool_size`` numbers,
    ``draw_size`` per game without replacement."""

    pool_size: int = 49
    draw_size: int = 6
    n: int = 0

    def __post_init__(self) -> None:
        if self.pool_size < 2:
            raise DomainError("pool_size must be >= 2")
        if not 1 <= self.draw_size < self.pool_size:
            raise DomainError(f"need 1 <= K < V, got K={self.draw_size}, V={self.pool_size}")
        if self.n < 1:
            raise DomainError("n must be >= 1")

    @property
    def p0(self) -> float:
        return 1.0 / self.pool_size

    @property
    def expected(self) -> float:
        return self.n / self.pool_size

    @property
    def correction(self) -> float:
        """Variance ratio (V - K) / (V - 1) of without- to with-replacement draws."""
        return (self.pool_size - self.draw_size) / (self.pool_size - 1)

    @property
    def sigma_iid_sq(self) -> float:
        v = self.pool_size
        return self.n * (v - 1) / v**2

    @property
    def sigma_k_sq(self) -> float:
        v = self.pool_size
        return self.n * (v - self.draw_size) / v**2


@dataclass(frozen=True)
class ZTestResult:
    statistic_iid: float
    statistic_corrected: float
    sigma_iid: float
    sigma_k: float
    p_value: float
    side: Side
    count: int
    expected: float


@dataclass(frozen=True)
class ChiSqTestResult:
    statistic_iid: float
    statistic_corrected: float
    df: int
    p_value: float
    draw_size: int
    n: int


def normal_p_value(z: float, side: Side) -> float:
    if side == "left":
        return std_normal_cdf(z)
    if side == "right":
        return std_normal_cdf(-z)
    if side == "two-sided":
        return min(1.0, 2.0 * std_normal_cdf(-abs(z)))
    raise DomainError(f"side must be one of {_SIDES}, got {side!r}")


def z_test_number(count: int, model: NullModel, side: Side = "left") -> ZTestResult:
    """Binomial test of P(number m) = 1/V from its count S_m.

    The i.i.d. statistic divides by sqrt(n (V-1) / V^2); the corrected one
    divides by sqrt(n (V-K) / V^2), which is the exact standard deviation of
    S_m when each game draws K balls without replacement.
    """
    if side not in _SIDES:
        raise DomainError(f"side must be one of {_SIDES}, got {side!r}")
    if int(count) != count or not 0 <= count <= model.n:
        raise DomainError(f"count must be an integer in [0, n={model.n}], got {count}")
    v, n = model.pool_size, model.n
    # (S - n/V) without rounding the expectation.
    deviation = (v * int(count) - n) / v
    sigma_iid = math.sqrt(model.sigma_iid_sq)
    sigma_k = math.sqrt(model.sigma_k_sq)
    z_iid = deviation / sigma_iid
    z_k = deviation / sigma_k
    return ZTestResult(
        statistic_iid=z_iid,
        statistic_corrected=z_k,
        sigma_iid=sigma_iid,
        sigma_k=sigma_k,
        p_value=normal_p_value(z_k, side),
        side=side,
        count=int(count),
        expected=model.expected,
    )


def pearson_test(counts: CountVector, model: NullModel) -> ChiSqTestResult:
    """Pearson goodness-of-fit against equal probabilities, scaled by
    (V - 1) / (V - K) and referred to chi-squared(V - 1)."""
    if counts.pool_size != model.pool_size:
        raise DomainError(f"counts cover {counts.pool_size} numbers, model has {model.pool_size}")
    if counts.total != model.n:
        raise DomainError(f"counts total {counts.total} does not match model n = {model.n}")
    v, n = model.pool_size, model.n
    # sum (S - n/V)^2 / (n/V) == sum (V S - n)^2 / (V n), evaluated in integers
    numerator = sum((v * int(s) - n) ** 2 for s in counts.counts)
    chi_iid = numerator / (v * n)
    chi_k = chi_iid / model.correction
    df = v - 1
    return ChiSqTestResult(
        statistic_iid=chi_iid,
        statistic_corrected=chi_k,
        df=df,
        p_value=chi_squared_sf(chi_k, df),
        draw_size=model.draw_size,
        n=n,
    )


@dataclass(frozen=True)
class PValueInterval:
    """Bracket for a p-value that has no single valid reference law."""

    low: float
    high: float
    note: str = "bounds only - mixed K"


@dataclass(frozen=True)
class SampleRow:
    sample: str
    kind: str
    n: int
    results: tuple[ChiSqTestResult, ...]
    p_value: float | PValueInterval

    def statistic_label(self) -> str:
        parts = []
        for r in self.results:
            if r.draw_size == 1:
                parts.append(f"chi2_iid = {r.statistic_iid:.2f}")
            else:
                parts.append(f"chi2_({r.draw_size}) = {r.statistic_corrected:.2f}")
        return " / ".join(parts)

    def p_label(self) -> str:
        p = self.p_value
        if isinstance(p, PValueInterval):
            return f"[{100 * p.low:.2f}%, {100 * p.high:.2f}%] ({p.note})"
        return f"{100 * p:.2f}%"


@dataclass(frozen=True)
class ChainReport:
    rows: tuple[SampleRow, ...]
    notices: tuple[str, ...] = field(default=())

    def row(self, sample: str) -> SampleRow:
        for r in self.rows:
            if r.sample == sample:
                return r
        raise KeyError(sample)

    def to_table(self) -> str:
        header = ("sample", "type", "n", "statistic", "p-value")
        body = [(r.sample, r.kind, str(r.n), r.statistic_label(), r.p_label()) for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(header, *body)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in (header, *body)]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.extend(self.notices)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("sample,type,n,statistic,p_value,p_value_low,p_value_high\n")
        for r in self.rows:
            for res in r.results:
                stat = res.statistic_iid if res.draw_size == 1 else res.statistic_corrected
                name = "chi2_iid" if res.draw_size == 1 else f"chi2_({res.draw_size})"
                if isinstance(r.p_value, PValueInterval):
                    lo, hi = r.p_value.low, r.p_value.high
                else:
                    lo = hi = r.p_value
                buf.write(f"{r.sample},{r.kind},{r.n},{name}={stat:.4f},{res.p_value:.6g},{lo:.6g},{hi:.6g}\n")
        return buf.getvalue()


def sample_chain_report(history: DrawHistory) -> ChainReport:
    """Pearson tests on the three samples a history supports.

    I: main numbers with the K correction. II: main plus additional numbers;
    games then mix K and K+1 balls, so only the interval spanned by the
    K+1 and K corrections is reported. III: additional numbers alone, one
    ball per game, i.e. the uncorrected test.
    """
    cfg = history.config
    v, k = cfg.pool_size, cfg.draw_size
    label = f"{k}/{v}"

    s1 = counts_from_history(history)
    r1 = pearson_test(s1, NullModel(v, k, s1.total))
    rows = [SampleRow("I", label, s1.total, (r1,), r1.p_value)]

    if history.n_additional == 0:
        return ChainReport(tuple(rows), ("no additional numbers: samples II and III omitted",))

    s2 = counts_from_history(history, include_additional=True)
    r2_k = pearson_test(s2, NullModel(v, k, s2.total))
    if k + 1 < v:
        r2_k1 = pearson_test(s2, NullModel(v, k + 1, s2.total))
        interval = PValueInterval(low=r2_k1.p_value, high=r2_k.p_value)
        rows.append(SampleRow("II", f"{label} + add. num.", s2.total, (r2_k1, r2_k), interval))
    else:
        rows.append(SampleRow("II", f"{label} + add. num.", s2.total, (r2_k,), r2_k.p_value))

    s3 = counts_from_history(history, additional_only=True)
    r3 = pearson_test(s3, NullModel(v, 1, s3.total))
    rows.append(SampleRow("III", "add. num. only", s3.total, (r3,), r3.p_value))
    return ChainReport(tuple(rows))

