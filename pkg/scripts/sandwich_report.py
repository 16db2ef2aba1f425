"""Minkowski contents and the explicit packing/energy bounds on every catalog set."""

import argparse
import math

from bestpack.asymptotics import energy_sweep, packing_sweep
from bestpack.energy import OptimizerOptions
from bestpack.geometry import Circle, Cube, Interval, SelfSimilar1D, Sphere2
from bestpack.minkowski import check_sandwich, content_estimate
from bestpack.packing import PackingOptions


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--restarts", type=int, default=4)
    args = ap.parse_args()
    popts = PackingOptions(restarts=args.restarts)
    eopts = OptimizerOptions(restarts=args.restarts)
    lam = math.log(2) / math.log(3)
    cases = [
        (Interval(), 1, [8, 16, 32, 64], [8, 16, 32, 64]),
        (Circle(), 1, [8, 16, 32, 64], [8, 16, 32, 64]),
        (Cube(2), 2, [8, 16, 32], [8, 16, 32]),
        (Sphere2(), 2, [12, 24, 48], [12, 24, 48]),
        (SelfSimilar1D(), lam, list(range(2, 130)), [8, 16, 32, 64]),
    ]
    for aset, alpha, NP, NE in cases:
        content = content_estimate(aset, alpha)
        packing = packing_sweep(aset, NP, popts).pairs()
        print(f"{aset.kind}: content in [{content.lower_content:.5f}, {content.upper_content:.5f}]")
        for s in (aset.ambient_dim + 1, 2 * aset.ambient_dim + 2):
            rep = check_sandwich(aset, alpha, s, packing, energy_sweep(aset, s, NE, eopts).pairs(), content)
            tight = min(rep.checks, key=lambda c: c.slack)
            print(f"  s={s}: {len(rep.checks)} checks, {len(rep.violations)} violations; "
                  f"tightest '{tight.name}' slack {tight.slack:.2e}")


if __name__ == "__main__":
    main()
