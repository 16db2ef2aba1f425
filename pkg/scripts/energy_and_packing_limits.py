"""Normalized energy and packing sweeps on the rectifiable catalog sets.

Writes one CSV per sweep plus plot-data triples; prints the extrapolated
interval energy constant next to 2 zeta(s).
"""

import argparse
from pathlib import Path

from bestpack.asymptotics import C_s1, energy_sweep, packing_sweep, richardson
from bestpack.energy import OptimizerOptions
from bestpack.geometry import Circle, Cube, Interval, Sphere2
from bestpack.packing import PackingOptions


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/limits")
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    eopts = OptimizerOptions(restarts=args.restarts, seed=args.seed)
    popts = PackingOptions(restarts=args.restarts, seed=args.seed, energy=eopts)

    for s in (2.0, 3.0):
        table = energy_sweep(Interval(), s, [8, 16, 32, 64, 128], eopts)
        (out / f"energy_interval_s{s:g}.csv").write_text(table.to_csv())
        (out / f"energy_interval_s{s:g}_plot.csv").write_text(table.plot_data_csv())
        print(f"interval s={s:g}: extrapolated {richardson(table):.6f}, 2 zeta(s) = {C_s1(s):.6f}")

    sweeps = [(Interval(), [8, 16, 32, 64]), (Circle(), [8, 16, 32, 64]), (Cube(2), [9, 16, 25, 36, 49]),
              (Sphere2(), [12, 24, 48, 96])]
    for aset, Ns in sweeps:
        table = packing_sweep(aset, Ns, popts)
        (out / f"packing_{aset.kind}.csv").write_text(table.to_csv())
        (out / f"packing_{aset.kind}_plot.csv").write_text(table.plot_data_csv())
        last = table.rows[-1]
        print(f"{aset.kind}: delta_N N^(1/d) at N={last.N} is {last.normalized:.5f}, limit {last.theory:.5f}")


if __name__ == "__main__":
    main()
