#!/usr/bin/env python3
"""Writes the sample market under data/sample/.

curve.csv       annual discount pillars to 60y
betas.csv       60 two-factor unit loading directions
quotes_280.csv  normal-vol book: 14 expiries x 14 tenors ATM, plus
                +-25/50/100 bp strikes on the 10y tenor for every expiry
"""
import argparse
import csv
import math
from pathlib import Path

EXPIRIES = list(range(1, 11)) + [15, 20, 25, 30]
TENORS = EXPIRIES
OFFSETS = [-100, -50, -25, 25, 50, 100]


def zero_rate(t):
    return 0.01 + 0.015 * (1.0 - math.exp(-t / 8.0))


def normal_vol(expiry, tenor, offset_bps):
    base = 0.0055 + 0.0025 * math.exp(-expiry / 6.0) + 0.0008 * math.exp(-tenor / 10.0)
    x = offset_bps / 100.0
    return base * (1.0 - 0.04 * x + 0.06 * x * x)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data" / "sample", type=Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with open(args.out / "curve.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["maturity_years", "discount"])
        for t in range(1, 61):
            w.writerow([t, f"{math.exp(-zero_rate(t) * t):.15f}"])

    with open(args.out / "betas.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["beta_1", "beta_2"])
        for k in range(60):
            phi = 1.2 * (1.0 - math.exp(-k / 10.0))
            w.writerow([f"{math.cos(phi):.15f}", f"{math.sin(phi):.15f}"])

    rows = []
    for m in EXPIRIES:
        for t in TENORS:
            rows.append((m, t, 0, normal_vol(m, t, 0)))
        for off in OFFSETS:
            rows.append((m, 10, off, normal_vol(m, 10, off)))
    with open(args.out / "quotes_280.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["maturity", "tenor", "strike_offset_bps", "normal_vol", "price", "weight"])
        for m, t, off, vol in rows:
            w.writerow([m, t, off, f"{vol:.8f}", "", 1])
    print(f"wrote {len(rows)} quotes to {args.out}")


if __name__ == "__main__":
    main()
