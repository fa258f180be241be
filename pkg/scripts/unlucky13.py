"""Binomial test for number 13 from the summary fixture, with and without
the finite-population correction."""

from pathlib import Path

from messing.lottery import parse_summary_csv
from messing.uniformity import NullModel, z_test_number

DATA = Path(__file__).resolve().parents[1] / "data" / "unlucky13_summary.csv"


def main() -> None:
    summary = parse_summary_csv(DATA.read_text(encoding="utf-8"))
    s = summary.counts[13]
    r = z_test_number(s, NullModel(49, 6, summary.total), "left")
    print(f"S_13 = {s}, n = {summary.total}, expected = {r.expected:.2f}")
    print(f"Z_iid = {r.statistic_iid:.4f}  Z_(6) = {r.statistic_corrected:.4f}  left p = {r.p_value:.5f}")


if __name__ == "__main__":
    main()
