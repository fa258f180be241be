"""Command line interface.

Subcommands: test-number, test-uniformity, simulate-zmin, normality, replay.
Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .distributions import DomainError
from .lottery import (
    DrawParseError,
    EmptySampleError,
    LotteryConfig,
    counts_from_history,
    parse_draw_csv,
    parse_summary_csv,
)
from .normality import analytic_snoop_size
from .snoopsim import (
    DEFAULT_SEED,
    SimulationConfig,
    corrected_p_value,
    distortion_to_csv,
    normality_size_power,
    simulate_zmin,
    size_distortion_table,
)
from .uniformity import ChainReport, NullModel, pearson_test, sample_chain_report, z_test_number

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
FULL_REPLICATIONS = 1_000_000
DISTORTION_ALPHAS = (0.01, 0.05, 0.10)

MESSING_BANNER = (
    "WARNING: this p-value is only valid if m was fixed before looking at the data.\n"
    "If m was picked because its count looked extreme, the test actually performed is\n"
    "on the minimum (or maximum) count; use `messing simulate-zmin --correct-p Z`\n"
    "for the p-value corrected for that selection."
)


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None


def _output_path(prefix: str, suffix: str) -> Path:
    return Path(f"{prefix}_{suffix}")


def _emit_manifest(command: str, config: dict, seed: int | None, out: str | None) -> dict:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if out:
        path = _output_path(out, "manifest.json")
        _write(path, text)
        print(f"manifest written to {path}")
    else:
        print("manifest: " + json.dumps(manifest, sort_keys=True), file=sys.stderr)
    return manifest


def _prob(p: float) -> str:
    return f"{p:.6g}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_test_number(args: argparse.Namespace) -> dict:
    v, k, m = args.pool_size, args.draw_size, args.m
    if not 1 <= m <= v:
        raise UsageError(f"--m must lie in 1..{v}, got {m}")
    if not 1 <= k < v:
        raise UsageError(f"--draw-size must lie in 1..{v - 1}, got {k}")
    if args.csv:
        history = parse_draw_csv(_read(args.csv), pool_size=v)
        k = history.config.draw_size
        counts = counts_from_history(history)
        count, n = counts[m], counts.total
    else:
        summary = parse_summary_csv(_read(args.summary))
        if m not in summary.counts:
            raise DataError(f"summary file has no count for number {m}")
        count, n = summary.counts[m], summary.total

    res = z_test_number(count, NullModel(v, k, n), args.side)
    print(f"number m = {m}: S_m = {count}, n = {n}, expected n/V = {res.expected:.2f}")
    print(f"sigma_iid = {res.sigma_iid:.4f}, sigma_({k}) = {res.sigma_k:.4f}")
    print(f"Z_iid = {res.statistic_iid:.4f}")
    print(f"Z = {res.statistic_corrected:.4f}  (corrected for {k} draws per game without replacement)")
    print(f"p = {res.p_value:.4f}  ({args.side}; exact {_prob(res.p_value)})")
    print()
    print(MESSING_BANNER)
    config = {
        "csv": args.csv,
        "summary": args.summary,
        "m": m,
        "pool_size": v,
        "draw_size": k,
        "side": args.side,
        "out": args.out,
    }
    if args.out:
        _write(
            _output_path(args.out, "ztest.csv"),
            "m,count,n,z_iid,z_corrected,p_value,side\n"
            f"{m},{count},{n},{res.statistic_iid:.6g},{res.statistic_corrected:.6g},{_prob(res.p_value)},{args.side}\n",
        )
    return config


def cmd_test_uniformity(args: argparse.Namespace) -> dict:
    v = args.pool_size
    config = {"csv": args.csv, "summary": args.summary, "sample": args.sample, "pool_size": v,
              "draw_size": args.draw_size, "out": args.out}
    if args.summary:
        if args.sample not in ("I", "all"):
            raise UsageError("a summary file supports sample I only")
        try:
            counts = parse_summary_csv(_read(args.summary)).to_count_vector(v)
        except DomainError as exc:
            raise DataError(str(exc)) from None
        res = pearson_test(counts, NullModel(v, args.draw_size, counts.total))
        print(f"sample I: n = {res.n}, chi2_iid = {res.statistic_iid:.2f}, "
              f"chi2_({res.draw_size}) = {res.statistic_corrected:.2f}, df = {res.df}, "
              f"p = {_prob(res.p_value)}")
        return config

    history = parse_draw_csv(_read(args.csv), pool_size=v)
    if args.sample in ("II", "III") and history.n_additional == 0:
        raise DataError(f"sample {args.sample} needs additional numbers, the history has none")
    report = sample_chain_report(history)
    if args.sample != "all":
        report = ChainReport((report.row(args.sample),))
    sys.stdout.write(report.to_table())
    if args.out:
        _write(_output_path(args.out, "uniformity.csv"), report.to_csv())
    return config


def cmd_simulate_zmin(args: argparse.Namespace) -> dict:
    try:
        lottery = LotteryConfig(args.pool_size, args.draw_size, args.games)
        cfg = SimulationConfig(replications=args.replications, seed=args.seed, lottery=lottery)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    dist = simulate_zmin(cfg, workers=args.workers)
    table = size_distortion_table(dist, DISTORTION_ALPHAS)
    print(f"Z_min under uniform draws: R = {cfg.replications}, N = {lottery.games} games, "
          f"{lottery.draw_size} out of {lottery.pool_size}, seed = {cfg.seed}")
    print(f"{'alpha':>6} {'P(Z_min <= z_alpha)':>20} {'MC s.e.':>9} {'inflation':>10}")
    for a, p in table.items():
        print(f"{a:>6.2f} {p:>20.4f} {dist.standard_error(p):>9.4f} {p / a:>10.2f}")
    if args.correct_p is not None:
        p = corrected_p_value(dist, args.correct_p)
        print(f"corrected p-value P(Z_min <= {args.correct_p}) = {p:.4f} (MC s.e. {dist.standard_error(p):.4f})")
    if args.out:
        _write(_output_path(args.out, "distribution.csv"), dist.to_csv())
        _write(_output_path(args.out, "density.csv"), dist.density().to_csv())
        _write(_output_path(args.out, "distortion.csv"), distortion_to_csv(table, len(dist)))
    return {
        "replications": cfg.replications,
        "games": lottery.games,
        "pool_size": lottery.pool_size,
        "draw_size": lottery.draw_size,
        "seed": cfg.seed,
        "correct_p": args.correct_p,
        "out": args.out,
    }


def cmd_normality(args: argparse.Namespace) -> dict:
    if args.analytic_sizes is not None:
        a = args.analytic_sizes
        try:
            s = analytic_snoop_size(a)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        print(f"analytic sizes at alpha = {a:g}: Gamma_max^2 {s.size_max:.4f} / Gamma_min^2 {s.size_min:.4f}")
        return {"analytic_sizes": a}
    if not 0.0 < args.alpha < 1.0:
        raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")
    replications = FULL_REPLICATIONS if args.full else args.replications
    try:
        cfg = SimulationConfig(
            replications=replications, seed=args.seed, sample_size=args.sample_size, alternative=args.alternative
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    table = normality_size_power(cfg, args.alpha, workers=args.workers)
    sys.stdout.write(table.to_table())
    if args.out:
        _write(_output_path(args.out, "size_power.csv"), table.to_csv())
    return {
        "replications": replications,
        "sample_size": cfg.sample_size,
        "alpha": args.alpha,
        "alternative": cfg.alternative,
        "seed": cfg.seed,
        "out": args.out,
    }


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="messing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def lottery_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--pool-size", type=_positive_int, default=49)
        p.add_argument("--draw-size", type=_positive_int, default=6)

    p = sub.add_parser("test-number", help="binomial test for one number's frequency")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", help="draw history CSV (date,n1..nK,add)")
    src.add_argument("--summary", help="summary CSV (m,count rows plus total,n)")
    p.add_argument("--m", type=int, required=True)
    lottery_flags(p)
    p.add_argument("--side", choices=("left", "right", "two-sided"), default="left")
    p.add_argument("--out")
    p.set_defaults(func=cmd_test_number)

    p = sub.add_parser("test-uniformity", help="Pearson uniformity tests on samples I/II/III")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv")
    src.add_argument("--summary")
    p.add_argument("--sample", choices=("I", "II", "III", "all"), default="all")
    lottery_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_test_uniformity)

    p = sub.add_parser("simulate-zmin", help="null distribution of the standardized minimum count")
    p.add_argument("--replications", type=_positive_int, default=10_000)
    p.add_argument("--games", type=_positive_int, default=10_000)
    lottery_flags(p)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--correct-p", type=float, metavar="Z")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate_zmin)

    p = sub.add_parser("normality", help="size/power of moment normality tests and selection strategies")
    p.add_argument("--replications", type=_positive_int, default=100_000)
    p.add_argument("--sample-size", type=_positive_int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--alternative", default="t(10)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--full", action="store_true", help=f"use R = {FULL_REPLICATIONS}")
    p.add_argument("--analytic-sizes", type=float, metavar="ALPHA")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="override the output prefix")
    p.set_defaults(func=None)
    return parser


def _argv_from_manifest(manifest: dict, out: str | None) -> list[str]:
    config = dict(manifest["config"])
    if out is not None:
        config["out"] = out
    argv = [manifest["command"]]
    for key, value in config.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        argv.extend([flag] if value is True else [flag, str(value)])
    return argv


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            manifest = json.loads(_read(args.manifest))
            return main(_argv_from_manifest(manifest, args.out))
        config = args.func(args)
        _emit_manifest(args.command, config, getattr(args, "seed", None), getattr(args, "out", None))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"messing: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DrawParseError, EmptySampleError, json.JSONDecodeError, KeyError) as exc:
        print(f"messing: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, ArithmeticError) as exc:
        print(f"messing: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
