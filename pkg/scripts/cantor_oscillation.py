"""Exact best-packing separations on the middle-third Cantor set.

Tabulates delta_N N^(1/lambda) for N = 2..N_max and the two subsequences
N = k 2^m and (k-1) 2^m + 1 whose limits differ.
"""

import argparse
import csv
from pathlib import Path

from bestpack.cantor import exact_delta, subsequence_oscillation
from bestpack.geometry import IFSSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/cantor")
    ap.add_argument("--n-max", type=int, default=256)
    ap.add_argument("-k", type=int, default=5)
    ap.add_argument("--m-max", type=int, default=8)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ifs = IFSSpec.cantor()

    with open(out / "normalized.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "delta_num", "delta_den", "normalized_value"])
        for N in range(2, args.n_max + 1):
            ex = exact_delta(ifs, N)
            w.writerow([N, ex.delta.numerator, ex.delta.denominator, format(ex.normalized(), ".17g")])

    rep = subsequence_oscillation(ifs, args.k, args.m_max)
    (out / "oscillation.csv").write_text(rep.to_csv())
    print(f"limits {rep.limit_kpm:.12f} and {rep.limit_cm:.12f}; ratio {rep.ratio:.12f} "
          f"(expected {rep.expected_ratio:.12f})")


if __name__ == "__main__":
    main()
