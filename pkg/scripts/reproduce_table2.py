"""Size and power of the moment normality tests and the max/min snooping
strategies. Pass --full for one million replications."""

import argparse

from messing.snoopsim import DEFAULT_SEED, SimulationConfig, normality_size_power


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replications", type=int, default=100_000)
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--sample-size", type=int, default=1000)
    ap.add_argument("--alternative", default="t(10)")
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = SimulationConfig(
        replications=1_000_000 if args.full else args.replications,
        seed=args.seed,
        sample_size=args.sample_size,
        alternative=args.alternative,
    )
    print(normality_size_power(cfg, args.alpha, workers=args.workers).to_table(), end="")


if __name__ == "__main__":
    main()
