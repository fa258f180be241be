"""K-out-of-V lottery: draw histories, CSV ingestion and count reduction."""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .distributions import DomainError, RngState, draw_without_replacement

__all__ = [
    "LotteryConfig",
    "Game",
    "DrawHistory",
    "CountVector",
    "SummaryCounts",
    "DrawParseError",
    "EmptySampleError",
    "simulate_history",
    "simulate_counts",
    "counts_from_history",
    "game_indicators",
    "count_variance",
    "parse_draw_csv",
    "serialize_draw_csv",
    "parse_summary_csv",
]


class DrawParseError(ValueError):
    """Malformed draw or summary file; ``line`` is 1-based (header = 1)."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class LotteryConfig:
    pool_size: int = 49
    draw_size: int = 6
    games: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.draw_size < self.pool_size:
            raise DomainError(
                f"need 1 <= draw_size < pool_size, got K={self.draw_size}, V={self.pool_size}"
            )
        if self.games < 1:
            raise DomainError(f"games must be >= 1, got {self.games}")

    @property
    def n(self) -> int:
        """Main numbers drawn over all games."""
        return self.games * self.draw_size


@dataclass(frozen=True)
class Game:
    numbers: tuple[int, ...]
    additional: int | None = None
    date: str | None = None

    @property
    def has_additional(self) -> bool:
        return self.additional is not None


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DrawHistory:
    """Games stored column-wise.

    ``main`` has shape (N, K) in drawing order, ``additional`` has length N
    with 0 marking games without an additional number.
    """

    config: LotteryConfig
    main: np.ndarray
    additional: np.ndarray
    dates: tuple[str | None, ...] = field(default=())

    def __post_init__(self) -> None:
        cfg = self.config
        main = _readonly(self.main)
        add = _readonly(self.additional)
        object.__setattr__(self, "main", main)
        object.__setattr__(self, "additional", add)
        if not self.dates:
            object.__setattr__(self, "dates", (None,) * cfg.games)
        if main.shape != (cfg.games, cfg.draw_size):
            raise DomainError(f"main must have shape {(cfg.games, cfg.draw_size)}, got {main.shape}")
        if add.shape != (cfg.games,) or len(self.dates) != cfg.games:
            raise DomainError("additional and dates must have one entry per game")
        if main.min() < 1 or main.max() > cfg.pool_size:
            raise DomainError("main numbers out of range")
        srt = np.sort(main, axis=1)
        if np.any(srt[:, 1:] == srt[:, :-1]):
            raise DomainError("duplicate number within a game")
        if add.min() < 0 or add.max() > cfg.pool_size:
            raise DomainError("additional number out of range")
        if np.any((main == add[:, None]) & (add[:, None] > 0)):
            raise DomainError("additional number repeats a main number")

    @classmethod
    def from_games(cls, games: list[Game], pool_size: int = 49) -> "DrawHistory":
        if not games:
            raise EmptySampleError("a history needs at least one game")
        k = len(games[0].numbers)
        cfg = LotteryConfig(pool_size=pool_size, draw_size=k, games=len(games))
        main = np.array([g.numbers for g in games], dtype=np.int64)
        add = np.array([g.additional or 0 for g in games], dtype=np.int64)
        return cls(cfg, main, add, tuple(g.date for g in games))

    def __len__(self) -> int:
        return self.config.games

    def __iter__(self) -> Iterator[Game]:
        for row, a, d in zip(self.main, self.additional, self.dates):
            yield Game(tuple(int(v) for v in row), int(a) if a else None, d)

    @property
    def games(self) -> list[Game]:
        return list(self)

    @property
    def n_additional(self) -> int:
        return int(np.count_nonzero(self.additional))


@dataclass(frozen=True, eq=False)
class CountVector:
    """Counts S_1..S_V; ``counts[m - 1]`` is S_m."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        c = _readonly(self.counts)
        if c.ndim != 1 or c.size < 2:
            raise DomainError("counts must be a vector over at least two numbers")
        if np.any(c < 0):
            raise DomainError("counts must be non-negative")
        object.__setattr__(self, "counts", c)

    @property
    def pool_size(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, m: int) -> int:
        if not 1 <= m <= self.pool_size:
            raise DomainError(f"number {m} outside 1..{self.pool_size}")
        return int(self.counts[m - 1])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CountVector) and np.array_equal(self.counts, other.counts)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "CountVector") -> "CountVector":
        return CountVector(self.counts + other.counts)


@dataclass(frozen=True)
class SummaryCounts:
    """Possibly partial published counts: ``{m: S_m}`` and the total n."""

    counts: dict[int, int]
    total: int

    def to_count_vector(self, pool_size: int = 49) -> CountVector:
        missing = [m for m in range(1, pool_size + 1) if m not in self.counts]
        if missing:
            raise EmptySampleError(f"summary lacks counts for numbers {missing[:5]}...")
        cv = CountVector(np.array([self.counts[m] for m in range(1, pool_size + 1)]))
        if cv.total != self.total:
            raise DomainError(f"counts sum to {cv.total} but total row says {self.total}")
        return cv


def count_variance(config: LotteryConfig) -> float:
    """Var(S_m) = K N (V - K) / V**2 under uniform draws without replacement."""
    v, k, n_games = config.pool_size, config.draw_size, config.games
    return k * n_games * (v - k) / v**2


def simulate_history(
    config: LotteryConfig, include_additional_fraction: float, rng: RngState
) -> DrawHistory:
    """Uniform random history; the first floor(fraction * N) games carry an
    additional number drawn from the V - K balls left in the urn."""
    if not 0.0 <= include_additional_fraction <= 1.0:
        raise DomainError("include_additional_fraction must lie in [0, 1]")
    n_with = math.floor(include_additional_fraction * config.games)
    gen = rng.generator()
    v, k = config.pool_size, config.draw_size
    main = np.empty((config.games, k), dtype=np.int64)
    add = np.zeros(config.games, dtype=np.int64)
    if n_with:
        if k + 1 > v:
            raise DomainError("no ball left for an additional number")
        head = draw_without_replacement(v, k + 1, n_with, gen)
        main[:n_with] = head[:, :k]
        add[:n_with] = head[:, k]
    if n_with < config.games:
        main[n_with:] = draw_without_replacement(v, k, config.games - n_with, gen)
    return DrawHistory(config, main, add)


def simulate_counts(config: LotteryConfig, rng: RngState) -> np.ndarray:
    """Sample-I count vector of one uniform history, without building it."""
    draws = draw_without_replacement(config.pool_size, config.draw_size, config.games, rng.generator())
    return np.bincount(draws.ravel(), minlength=config.pool_size + 1)[1:]


def counts_from_history(
    history: DrawHistory, include_additional: bool = False, additional_only: bool = False
) -> CountVector:
    """Reduce a history to counts.

    * default: sample I, main numbers only (n = N K)
    * ``include_additional``: sample II, main plus additional numbers
    * ``additional_only``: sample III, additional numbers only (overrides the other flag)
    """
    v = history.config.pool_size
    add = history.additional[history.additional > 0]
    if additional_only:
        if add.size == 0:
            raise EmptySampleError("history has no additional numbers")
        return CountVector(np.bincount(add, minlength=v + 1)[1:])
    counts = np.bincount(history.main.ravel(), minlength=v + 1)[1:]
    if include_additional:
        counts = counts + np.bincount(add, minlength=v + 1)[1:]
    return CountVector(counts)


def game_indicators(history: DrawHistory, m: int) -> np.ndarray:
    """Y_{m,j}: 1 where number ``m`` is among game j's main numbers."""
    if not 1 <= m <= history.config.pool_size:
        raise DomainError(f"number {m} outside 1..{history.config.pool_size}")
    return (history.main == m).any(axis=1).astype(np.int8)


# ---------------------------------------------------------------------------
# CSV formats
# ---------------------------------------------------------------------------


def _parse_int(token: str, line: int, column: str) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise DrawParseError(line, f"column {column!r}: not an integer: {token!r}") from None


def parse_draw_csv(text: str | io.TextIOBase, pool_size: int = 49) -> DrawHistory:
    """Parse ``date,n1,...,nK,add`` rows into a history.

    ``add`` is empty for games without an additional number. Dates must be
    ISO ``YYYY-MM-DD`` or empty.
    """
    if not isinstance(text, str):
        text = text.read()
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise DrawParseError(1, "empty file")
    header = [h.strip() for h in rows[0]]
    k = len(header) - 2
    expected = ["date", *[f"n{i}" for i in range(1, k + 1)], "add"]
    if k < 1 or header != expected:
        raise DrawParseError(1, f"header must be {','.join(['date', 'n1', '...', 'nK', 'add'])}, got {','.join(header)}")
    if not 1 <= k < pool_size:
        raise DrawParseError(1, f"{k} numbers per game is incompatible with pool size {pool_size}")

    games = []
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            raise DrawParseError(line, "blank row")
        if len(row) != k + 2:
            raise DrawParseError(line, f"expected {k + 2} fields, got {len(row)}")
        date = row[0].strip() or None
        if date is not None:
            try:
                dt.date.fromisoformat(date)
            except ValueError:
                raise DrawParseError(line, f"bad ISO date {date!r}") from None
        numbers = tuple(_parse_int(tok, line, f"n{i}") for i, tok in enumerate(row[1 : k + 1], start=1))
        for x in numbers:
            if not 1 <= x <= pool_size:
                raise DrawParseError(line, f"number {x} outside 1..{pool_size}")
        if len(set(numbers)) != k:
            raise DrawParseError(line, f"duplicate number in game {numbers}")
        add = None
        if row[-1].strip():
            add = _parse_int(row[-1], line, "add")
            if not 1 <= add <= pool_size:
                raise DrawParseError(line, f"additional number {add} outside 1..{pool_size}")
            if add in numbers:
                raise DrawParseError(line, f"additional number {add} repeats a main number")
        games.append(Game(numbers, add, date))
    if not games:
        raise DrawParseError(2, "no games")
    return DrawHistory.from_games(games, pool_size=pool_size)


def serialize_draw_csv(history: DrawHistory) -> str:
    k = history.config.draw_size
    lines = [",".join(["date", *[f"n{i}" for i in range(1, k + 1)], "add"])]
    for game in history:
        cells = [game.date or "", *map(str, game.numbers), str(game.additional) if game.additional else ""]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_summary_csv(text: str | io.TextIOBase) -> SummaryCounts:
    """Parse ``m,count`` rows plus one ``total,n`` row."""
    if not isinstance(text, str):
        text = text.read()
    counts: dict[int, int] = {}
    total = None
    for line, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise DrawParseError(line, f"expected 2 fields, got {len(row)}")
        key, value = row[0].strip(), row[1].strip()
        if line == 1 and key == "m":
            continue
        if key == "total":
            total = _parse_int(value, line, "count")
            continue
        m = _parse_int(key, line, "m")
        c = _parse_int(value, line, "count")
        if m < 1 or c < 0:
            raise DrawParseError(line, f"invalid row m={m}, count={c}")
        if m in counts:
            raise DrawParseError(line, f"number {m} listed twice")
        counts[m] = c
    if total is None:
        raise DrawParseError(line if counts else 1, "missing 'total,n' row")
    if sum(counts.values()) > total:
        raise DrawParseError(line, "listed counts exceed the total")
    return SummaryCounts(counts, total)
