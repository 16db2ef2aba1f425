"""Normalized energy/packing sequences, limit constants and root limits."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import OptimizerOptions, minimize_energy
from .geometry import CompactSet, SelfSimilar1D, ball_volume
from .packing import PackingOptions, best_packing

DELTA = {1: 1.0, 2: math.pi / math.sqrt(12), 3: math.pi / math.sqrt(18)}


def beta(alpha: float) -> float:
    return ball_volume(alpha)


def C_inf(d: int) -> float:
    """Unit-cube best-packing constant ``2 (Delta_d / beta_d)**(1/d)``."""
    if d not in DELTA:
        raise ValueError(f"packing density unknown for d={d}")
    return 2 * (DELTA[d] / beta(d)) ** (1 / d)


def zeta(s: float, terms: int = 64) -> float:
    """Riemann zeta for real ``s > 1``: partial sum plus Euler-Maclaurin tail."""
    if s <= 1:
        raise ValueError("zeta needs s > 1")
    n = terms
    head = math.fsum(k**-s for k in range(1, n))
    # tail sum_{k>=n} k^-s via Euler-Maclaurin with three Bernoulli corrections
    tail = n ** (1 - s) / (s - 1) + 0.5 * n**-s
    tail += s * n ** (-s - 1) / 12
    tail -= s * (s + 1) * (s + 2) * n ** (-s - 3) / 720
    tail += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * n ** (-s - 5) / 30240
    return head + tail


def C_s1(s: float) -> float:
    """One-dimensional energy constant ``2 zeta(s)``."""
    return 2 * zeta(s)


@dataclass
class Row:
    N: int
    raw: float
    normalized: float
    theory: float | None = None
    rel_gap: float | None = None
    config: object = field(default=None, repr=False)


@dataclass
class AsymptoticsTable:
    set: CompactSet
    mode: str  # "energy" or "packing"
    s: float | None
    d_used: float
    rows: list = field(default_factory=list)

    def add(self, N: int, raw: float, theory: float | None, config=None) -> Row:
        if self.mode == "energy":
            normalized = raw / N ** (1 + self.s / self.d_used)
        else:
            normalized = raw * N ** (1 / self.d_used)
        gap = None if theory is None else (normalized - theory) / theory
        row = Row(N, raw, normalized, theory, gap, config)
        self.rows.append(row)
        self.rows.sort(key=lambda r: r.N)
        return row

    def pairs(self) -> list:
        """``(N, raw)`` pairs, the form the sandwich check consumes."""
        return [(r.N, r.raw) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "mode", "s", "d", "N", "raw", "normalized", "theory", "rel_gap"])
        s = "" if self.s is None else _fmt(self.s)
        for r in self.rows:
            w.writerow([self.set.kind, self.mode, s, _fmt(self.d_used), r.N, _fmt(r.raw),
                        _fmt(r.normalized), _fmt(r.theory), _fmt(r.rel_gap)])
        return buf.getvalue()

    def plot_data_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "theory"])
        for r in self.rows:
            w.writerow([r.N, _fmt(r.normalized), _fmt(r.theory)])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def richardson(table: AsymptoticsTable) -> float:
    """Two-point extrapolation of the normalized values assuming an ``O(1/N)`` correction."""
    if len(table.rows) < 2:
        raise ValueError("need at least two rows")
    a, b = table.rows[-2], table.rows[-1]
    return (b.N * b.normalized - a.N * a.normalized) / (b.N - a.N)


def _check_increasing(N_list) -> list:
    N_list = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    return N_list


def energy_theory(aset: CompactSet, s: float) -> float | None:
    h = aset.hausdorff_measure
    if aset.intrinsic_dim == 1 and not isinstance(aset, SelfSimilar1D) and h:
        return C_s1(s) * h**-s
    return None


def packing_theory(aset: CompactSet) -> float | None:
    d = aset.intrinsic_dim
    h = aset.hausdorff_measure
    if isinstance(aset, SelfSimilar1D) or h is None or d not in DELTA:
        return None
    return C_inf(int(d)) * h ** (1 / d)


def energy_sweep(aset: CompactSet, s: float, N_list, opts: OptimizerOptions | None = None,
                 keep_configs: bool = False) -> AsymptoticsTable:
    """Minimal energies normalized by ``N**(1 + s/d)`` with ``d`` the intrinsic dimension."""
    d = aset.intrinsic_dim
    if s <= d:
        raise ValueError(f"s={s} must exceed the dimension {d}")
    N_list = _check_increasing(N_list)
    table = AsymptoticsTable(aset, "energy", float(s), d)
    theory = energy_theory(aset, s)
    for N in N_list:
        rep = minimize_energy(aset, N, s, opts)
        table.add(N, rep.energy, theory, rep.config if keep_configs else None)
    return table


def packing_sweep(aset: CompactSet, N_list, opts: PackingOptions | None = None,
                  keep_configs: bool = False) -> AsymptoticsTable:
    """Separations normalized by ``N**(1/d)``; exact values on self-similar sets."""
    N_list = _check_increasing(N_list)
    d = aset.intrinsic_dim
    table = AsymptoticsTable(aset, "packing", None, d)
    theory = packing_theory(aset)
    for N in N_list:
        if isinstance(aset, SelfSimilar1D):
            from .cantor import exact_delta
            from .energy import Configuration

            ex = exact_delta(aset.ifs, N)
            config = Configuration(aset, np.array([[float(w)] for w in ex.witness])) if keep_configs else None
            table.add(N, float(ex.delta), theory, config)
        else:
            rep = best_packing(aset, N, opts)
            table.add(N, rep.delta, theory, rep.config if keep_configs else None)
    return table


def root_limit_fixed_N(aset: CompactSet, N: int, s_list, opts: OptimizerOptions | None = None,
                       packing_opts: PackingOptions | None = None) -> list:
    """``(s, E_s**(1/s) * delta_N)`` for increasing ``s``; tends to 1 as ``s`` grows."""
    s_list = [float(s) for s in s_list]
    if any(b <= a for a, b in zip(s_list, s_list[1:])):
        raise ValueError("s_list must be increasing")
    if s_list and s_list[0] <= aset.ambient_dim:
        raise ValueError("every s must exceed the ambient dimension")
    pack = best_packing(aset, N, packing_opts)
    out = []
    for s in s_list:
        rep = minimize_energy(aset, N, s, opts, init=pack.config)
        out.append((s, math.exp(math.log(rep.energy) / s) * pack.delta))
    return out


def csd_root_limit(s_list) -> list:
    """``(s, (2 zeta(s))**(1/s))``; tends to ``1 / C_inf(1) = 1``."""
    return [(float(s), C_s1(s) ** (1 / s)) for s in s_list]
