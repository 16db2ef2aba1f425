"""Region-count deviations of energy minima and best packings as N grows."""

import argparse
from pathlib import Path

from bestpack.energy import OptimizerOptions, minimize_energy
from bestpack.equidist import arcs, equidist_deviation, hemispheres, quartiles
from bestpack.geometry import Circle, Interval, Sphere2
from bestpack.packing import PackingOptions, best_packing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/equidist")
    ap.add_argument("--restarts", type=int, default=2)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    Ns = [8, 16, 32, 64, 128]
    for aset, regions in [(Interval(), quartiles(Interval())), (Circle(), arcs(Circle())),
                          (Sphere2(), hemispheres(Sphere2()))]:
        energy = [minimize_energy(aset, N, 3, OptimizerOptions(restarts=args.restarts)).config for N in Ns]
        packing = [best_packing(aset, N, PackingOptions(restarts=args.restarts)).config for N in Ns]
        for tag, configs in (("energy", energy), ("packing", packing)):
            rep = equidist_deviation(configs, regions)
            (out / f"{aset.kind}_{tag}.csv").write_text(rep.to_csv())
            print(aset.kind, tag, {N: round(v, 4) for N, v in rep.max_by_N.items()})


if __name__ == "__main__":
    main()
