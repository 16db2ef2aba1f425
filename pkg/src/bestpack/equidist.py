"""Region counts of point configurations against Hausdorff-measure fractions.

Regions are closed: a point on the relative boundary counts toward the
region (within ``BOUNDARY_TOL``).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import Configuration
from .geometry import Circle, CompactSet, Cube, Interval, Sphere2

BOUNDARY_TOL = 1e-12
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Region:
    """A closed subset ``B`` of a catalog set with ``H_d(B) / H_d(A)`` attached.

    ``kind`` is one of ``full``, ``subinterval`` (params ``a, b``), ``arc``
    (angles ``theta1 <= theta2``, counterclockwise), ``spherical_cap``
    (unit ``axis`` and ``height``: points with ``<x/R, axis> >= height``)
    or ``subcube`` (corner vectors ``lo, hi``).
    """

    set: CompactSet
    kind: str
    params: tuple = ()
    label: str = ""
    measure_fraction: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "measure_fraction", _measure_fraction(self))
        if not self.label:
            object.__setattr__(self, "label", f"{self.kind}{self.params}")

    def contains(self, X: np.ndarray) -> np.ndarray:
        X = self.set.check_points(X)
        tol = BOUNDARY_TOL
        if self.kind == "full":
            return np.ones(len(X), dtype=bool)
        if self.kind == "subinterval":
            a, b = self.params
            return (X[:, 0] >= a - tol) & (X[:, 0] <= b + tol)
        if self.kind == "arc":
            t1, t2 = self.params
            theta = np.arctan2(X[:, 1], X[:, 0])
            offset = np.mod(theta - t1, TWO_PI)
            # a point just below t1 wraps to ~2 pi; pull it back onto the boundary
            offset = np.where(offset > TWO_PI - tol, 0.0, offset)
            return offset <= (t2 - t1) + tol
        if self.kind == "spherical_cap":
            axis, h = self.params
            u = np.asarray(axis, dtype=float)
            return X @ u / self.set.radius >= h - tol
        if self.kind == "subcube":
            lo, hi = (np.asarray(v, dtype=float) for v in self.params)
            return np.all((X >= lo - tol) & (X <= hi + tol), axis=1)
        raise ValueError(f"unknown region kind {self.kind!r}")

    def complement(self) -> "Region":
        """Closure of ``A \\ B`` for arcs and caps."""
        if self.kind == "arc":
            t1, t2 = self.params
            return Region(self.set, "arc", (t2, t1 + TWO_PI))
        if self.kind == "spherical_cap":
            axis, h = self.params
            return Region(self.set, "spherical_cap", (tuple(-float(a) for a in axis), -h))
        raise ValueError(f"complement not available for {self.kind}")


def _measure_fraction(region: Region) -> float:
    aset, kind, p = region.set, region.kind, region.params
    if kind == "full":
        return 1.0
    if kind == "subinterval" and isinstance(aset, Interval):
        a, b = max(p[0], aset.a), min(p[1], aset.b)
        return max(b - a, 0.0) / (aset.b - aset.a)
    if kind == "arc" and isinstance(aset, Circle):
        t1, t2 = p
        if not 0 <= t2 - t1 <= TWO_PI:
            raise ValueError("arc needs theta1 <= theta2 <= theta1 + 2 pi")
        return (t2 - t1) / TWO_PI
    if kind == "spherical_cap" and isinstance(aset, Sphere2):
        axis, h = p
        if not math.isclose(float(np.linalg.norm(axis)), 1.0, rel_tol=1e-12):
            raise ValueError("cap axis must be a unit vector")
        h = min(max(h, -1.0), 1.0)
        return (1 - h) / 2  # cap area is proportional to its height
    if kind == "subcube" and isinstance(aset, Cube):
        lo, hi = (np.clip(np.asarray(v, dtype=float), 0.0, 1.0) for v in p)
        return float(np.prod(np.maximum(hi - lo, 0.0)))
    raise ValueError(f"region kind {kind!r} does not apply to {aset.kind}")


def region_fraction(config: Configuration, region: Region) -> float:
    """Share of the configuration's points lying in the closed region."""
    if config.set != region.set:
        raise ValueError("region belongs to a different set")
    return int(np.count_nonzero(region.contains(config.points))) / config.N


def quartiles(aset: Interval) -> list:
    a, b = aset.a, aset.b
    cuts = [a + (b - a) * q / 4 for q in range(5)]
    return [Region(aset, "subinterval", (cuts[i], cuts[i + 1]), f"q{i + 1}") for i in range(4)]


def arcs(aset: Circle, count: int = 4, phase: float = 0.1) -> list:
    w = TWO_PI / count
    return [Region(aset, "arc", (phase + i * w, phase + (i + 1) * w), f"arc{i + 1}") for i in range(count)]


def hemispheres(aset: Sphere2, axis=(0.0, 0.0, 1.0)) -> list:
    up = Region(aset, "spherical_cap", (tuple(axis), 0.0), "upper")
    return [up, Region(aset, "spherical_cap", up.complement().params, "lower")]


@dataclass
class DeviationReport:
    rows: list  # (N, region label, fraction, measure_fraction, deviation)
    max_by_N: dict
    excluded: list  # N values below the asymptotic cutoff

    def assessed(self) -> dict:
        return {N: v for N, v in self.max_by_N.items() if N not in self.excluded}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "region", "fraction", "measure_fraction", "deviation"])
        for N, label, f, m, dev in self.rows:
            w.writerow([N, label, format(f, ".17g"), format(m, ".17g"), format(dev, ".17g")])
        return buf.getvalue()


def equidist_deviation(configs, regions, min_N: int = 8) -> DeviationReport:
    """Max over regions of ``|fraction - measure_fraction|`` for each configuration.

    Configurations with fewer than ``min_N`` points are reported but flagged
    as excluded, since the property is asymptotic.
    """
    rows, worst, excluded = [], {}, []
    for config in sorted(configs, key=lambda c: c.N):
        for region in regions:
            f = region_fraction(config, region)
            dev = abs(f - region.measure_fraction)
            rows.append((config.N, region.label, f, region.measure_fraction, dev))
            worst[config.N] = max(worst.get(config.N, 0.0), dev)
        if config.N < min_N and config.N not in excluded:
            excluded.append(config.N)
    return DeviationReport(rows, worst, excluded)
