"""Neighborhood volumes, Minkowski contents and the packing/energy sandwich.

``vol(A(rho))`` is taken from closed forms wherever the set admits one
(Steiner-type formulas, and an exact gap sum for self-similar sets);
Monte Carlo over the bounding box is available as an independent check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import energy_upper_constant
from .geometry import Circle, CompactSet, Cube, Interval, SelfSimilar1D, Sphere2, ball_volume


@dataclass
class VolumeEstimate:
    volume: float
    stderr: float
    method: str


def exact_volume(aset: CompactSet, rho: float) -> float | None:
    """Closed-form ``vol(A(rho))``, or ``None`` when the set has none."""
    if isinstance(aset, Interval):
        return aset.b - aset.a + 2 * rho
    if isinstance(aset, Circle):
        R = aset.radius
        return 4 * math.pi * R * rho if rho < R else math.pi * (R + rho) ** 2
    if isinstance(aset, Sphere2):
        R = aset.radius
        inner = (R - rho) ** 3 if rho < R else 0.0
        return 4 * math.pi / 3 * ((R + rho) ** 3 - inner)
    if isinstance(aset, Cube):
        d = aset.d
        return sum(math.comb(d, k) * ball_volume(k) * rho**k for k in range(d + 1))
    if isinstance(aset, SelfSimilar1D):
        return _self_similar_volume(aset, rho)
    return None


def _self_similar_volume(aset: SelfSimilar1D, rho: float) -> float:
    # [-rho, 1 + rho] minus the part of every gap that stays uncovered
    sigma = float(aset.ifs.sigma)
    gaps = [float(g) for g in aset.ifs.child_gaps()]
    total = 1.0 + 2 * rho
    level, copies = 0, 1
    while max(gaps) * sigma**level > 2 * rho:
        for g in gaps:
            total -= copies * max(g * sigma**level - 2 * rho, 0.0)
        level += 1
        copies *= aset.ifs.p
    return total


def monte_carlo_volume(aset: CompactSet, rho: float, samples: int = 200_000, seed: int = 0,
                       blocks: int = 8) -> VolumeEstimate:
    if isinstance(aset, SelfSimilar1D):
        raise ValueError("Monte Carlo is not used on measure-zero self-similar sets")
    lo, hi = aset.bounding_box(rho)
    box = float(np.prod(hi - lo))
    hits = 0
    per_block = max(samples // blocks, 1)
    for child in np.random.SeedSequence(seed).spawn(blocks):
        rng = np.random.default_rng(child)
        X = rng.uniform(lo, hi, size=(per_block, aset.ambient_dim))
        hits += int(np.count_nonzero(aset.distance(X) < rho))
    n = per_block * blocks
    frac = hits / n
    return VolumeEstimate(box * frac, box * math.sqrt(frac * (1 - frac) / n), "monte_carlo")


def neighborhood_volume(aset: CompactSet, rho: float, samples: int = 200_000, seed: int = 0,
                        method: str = "auto") -> VolumeEstimate:
    """Lebesgue measure of the open ``rho``-neighborhood of ``aset``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if method in ("auto", "exact"):
        v = exact_volume(aset, rho)
        if v is not None:
            return VolumeEstimate(v, 0.0, "exact")
        if method == "exact":
            raise ValueError(f"no closed form for {aset.kind}")
    return monte_carlo_volume(aset, rho, samples, seed)


def default_rho_grid(aset: CompactSet, levels: int = 17, per_period: int = 64) -> list[float]:
    """``rho0 * 2**-j``; on self-similar sets, ``per_period`` points per factor ``sigma`` instead.

    The normalized volume of a self-similar set is log-periodic with period
    ``sigma``, which a factor-2 grid samples too coarsely to see its extremes.
    """
    rho0 = 0.1 * aset.diameter
    if isinstance(aset, SelfSimilar1D):
        sigma = float(aset.ifs.sigma)
        rho_min = rho0 * 2.0 ** -(levels - 1)
        count = math.ceil(math.log(rho_min / rho0) / math.log(sigma) * per_period) + 1
        return list(rho0 * sigma ** (np.arange(count) / per_period))
    return [rho0 * 2.0**-j for j in range(levels)]


@dataclass
class ContentEstimate:
    alpha: float
    ambient_dim: int
    rho_values: list
    volumes: list
    stderrs: list
    normalized: list
    lower_content: float
    upper_content: float
    normalization: str

    def raw_bounds(self) -> tuple[float, float]:
        """Lower/upper contents in the ``vol / rho**(d' - alpha)`` normalization."""
        if self.normalization == "raw":
            return self.lower_content, self.upper_content
        c = ball_volume(self.ambient_dim - self.alpha)
        return self.lower_content * c, self.upper_content * c

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rho", "volume", "volume_stderr", "normalized_value"])
        for row in zip(self.rho_values, self.volumes, self.stderrs, self.normalized):
            w.writerow([format(v, ".17g") for v in row])
        return buf.getvalue()


def content_estimate(aset: CompactSet, alpha: float, rho_grid=None, normalization: str = "paper",
                     method: str = "auto", samples: int = 200_000, seed: int = 0) -> ContentEstimate:
    """Normalized neighborhood volumes; liminf/limsup proxied by min/max over the finer half."""
    dim = aset.ambient_dim
    if not 0 < alpha <= dim:
        raise ValueError(f"alpha must lie in (0, {dim}]")
    if normalization not in ("paper", "raw"):
        raise ValueError("normalization is 'paper' or 'raw'")
    rhos = list(rho_grid) if rho_grid is not None else default_rho_grid(aset)
    if any(b >= a for a, b in zip(rhos, rhos[1:])):
        raise ValueError("rho grid must be strictly decreasing")
    const = ball_volume(dim - alpha) if normalization == "paper" else 1.0
    vols, errs, norm = [], [], []
    for j, rho in enumerate(rhos):
        est = neighborhood_volume(aset, rho, samples, seed + j, method)
        vols.append(est.volume)
        errs.append(est.stderr)
        norm.append(est.volume / (const * rho ** (dim - alpha)))
    tail = norm[len(norm) // 2:]  # finer half of the grid
    return ContentEstimate(alpha, dim, rhos, vols, errs, norm, min(tail), max(tail), normalization)


# ---------------------------------------------------------------------------
# Volume certificates at finite N
# ---------------------------------------------------------------------------


def _volume_fn(aset: CompactSet):
    if exact_volume(aset, 0.5 * aset.diameter) is None:
        raise ValueError(f"no closed-form volume for {aset.kind}")
    return lambda r: exact_volume(aset, r)


def _bisect(pred, lo: float, hi: float, iters: int = 200) -> float:
    """Returns ``hi`` with ``pred(hi)`` true, assuming ``pred(hi)`` and not ``pred(lo)``."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def packing_upper_certificate(aset: CompactSet, N: int) -> float:
    """Smallest ``2 rho`` with ``vol(A(rho)) < N beta_{d'} rho**d'``; ``delta_N`` cannot exceed it."""
    vol = _volume_fn(aset)
    dim = aset.ambient_dim
    beta = ball_volume(dim)
    ok = lambda r: vol(r) < N * beta * r**dim
    grid = np.geomspace(1e-9 * aset.diameter, 2 * aset.diameter, 600)
    hits = [r for r in grid if ok(r)]
    if not hits:
        return 2 * aset.diameter
    first = hits[0]
    below = grid[list(grid).index(first) - 1] if first != grid[0] else 0.0
    return 2 * _bisect(ok, below, first)


def packing_lower_certificate(aset: CompactSet, N: int) -> float:
    """Largest ``rho`` with ``vol(A(rho)) >= N mu_{d'} rho**d'``; ``delta_N`` is at least that."""
    vol = _volume_fn(aset)
    dim = aset.ambient_dim
    mu = ball_volume(dim) * 2**dim
    ok = lambda r: vol(r) >= N * mu * r**dim
    grid = np.geomspace(1e-9 * aset.diameter, 2 * aset.diameter, 600)
    hits = [r for r in grid if ok(r)]
    if not hits:
        return 0.0
    last = hits[-1]
    k = list(grid).index(last)
    above = grid[k + 1] if k + 1 < len(grid) else 4 * aset.diameter
    # bisect on "not ok" to keep the returned value inside the certified region
    lo, hi = last, above
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Sandwich check
# ---------------------------------------------------------------------------


@dataclass
class SandwichCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool
    slack: float  # relative margin, (rhs - lhs) / |rhs|


@dataclass
class SandwichReport:
    set_kind: str
    alpha: float
    s: float
    status: str
    checks: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return self.status == "ok" and not self.violations


def _le(name, lhs, rhs, rel_tol=0.0) -> SandwichCheck:
    ok = lhs <= rhs * (1 + rel_tol) if rhs >= 0 else lhs <= rhs * (1 - rel_tol)
    slack = (rhs - lhs) / abs(rhs) if rhs else float("inf")
    return SandwichCheck(name, float(lhs), float(rhs), bool(ok), float(slack))


def limit_proxies(pairs) -> tuple[float, float]:
    """Lower/upper limit proxies of a sequence ``(N, value)``.

    A monotone tail is extrapolated to ``N = inf`` assuming an ``O(1/N)``
    correction; otherwise the min and max over the tail half are used.
    """
    pairs = sorted(pairs)
    vals = [v for _, v in pairs]
    tail = pairs[len(pairs) // 2:] if len(pairs) >= 4 else pairs
    tv = [v for _, v in tail]
    monotone = all(b <= a for a, b in zip(vals, vals[1:])) or all(b >= a for a, b in zip(vals, vals[1:]))
    if monotone and len(pairs) >= 2:
        (n1, f1), (n2, f2) = pairs[-2], pairs[-1]
        est = (n2 * f2 - n1 * f1) / (n2 - n1)
        return est, est
    return min(tv), max(tv)


def check_sandwich(aset: CompactSet, alpha: float, s: float, packing_seq, energy_seq,
                   content: ContentEstimate, rel_tol: float = 1e-3) -> SandwichReport:
    """Evaluate the explicit packing/energy bounds in terms of neighborhood volumes.

    ``packing_seq`` and ``energy_seq`` are iterables of ``(N, value)`` with
    the raw measured separation and energy.  Finite-``N`` checks use the
    volume certificates directly; limit-level checks compare extrapolated
    normalized sequences with the constants built from the contents, within
    ``rel_tol`` to absorb the finite-``N`` proxy.
    """
    packing = sorted((int(n), float(v)) for n, v in packing_seq)
    energy = sorted((int(n), float(v)) for n, v in energy_seq)
    report = SandwichReport(aset.kind, alpha, s, "ok")
    if not packing or not energy:
        report.status = "insufficient data"
        return report
    dim = aset.ambient_dim
    beta, mu = ball_volume(dim), ball_volume(dim) * 2**dim
    eta = energy_upper_constant(s, dim)
    has_volume = exact_volume(aset, 0.5 * aset.diameter) is not None
    delta_at = dict(packing)

    if has_volume:
        for N, d in packing:
            report.checks.append(_le(f"delta_{N} <= volume upper certificate", d,
                                     packing_upper_certificate(aset, N), 1e-9))
            report.checks.append(_le(f"delta_{N} >= volume lower certificate",
                                     packing_lower_certificate(aset, N), d, 1e-9))
        for N, e in energy:
            if N // 2 >= 2:
                lower = (N / 2) * packing_upper_certificate(aset, N // 2) ** -s
                report.checks.append(_le(f"E_{N} >= (N/2) (upper delta_(N/2))^-s", lower, e, 1e-9))
            sep = delta_at.get(N) or packing_lower_certificate(aset, N)
            report.checks.append(_le(f"E_{N} <= eta_s N / delta_N^s", e, eta * N * sep**-s, 1e-9))

    low_raw, up_raw = content.raw_bounds()
    g_low, g_up = limit_proxies([(N, d * N ** (1 / alpha)) for N, d in packing])
    e_low, e_up = limit_proxies([(N, e / N ** (1 + s / alpha)) for N, e in energy])
    c3, c4 = mu ** (-1 / alpha), 2 * beta ** (-1 / alpha)
    half = 0.5
    c1 = half * (1 - half) ** (s / alpha) * c4**-s
    c2 = eta * c3**-s
    report.checks += [
        _le("c3 lower-content^(1/alpha) <= liminf packing", c3 * low_raw ** (1 / alpha), g_low, rel_tol),
        _le("liminf packing <= c4 lower-content^(1/alpha)", g_low, c4 * low_raw ** (1 / alpha), rel_tol),
        _le("c3 upper-content^(1/alpha) <= limsup packing", c3 * up_raw ** (1 / alpha), g_up, rel_tol),
        _le("limsup packing <= c4 upper-content^(1/alpha)", g_up, c4 * up_raw ** (1 / alpha), rel_tol),
        _le("c1 lower-content^(-s/alpha) <= limsup energy", c1 * low_raw ** (-s / alpha), e_up, rel_tol),
        _le("limsup energy <= c2 lower-content^(-s/alpha)", e_up, c2 * low_raw ** (-s / alpha), rel_tol),
        _le("c1 upper-content^(-s/alpha) <= liminf energy", c1 * up_raw ** (-s / alpha), e_low, rel_tol),
        _le("liminf energy <= c2 upper-content^(-s/alpha)", e_low, c2 * up_raw ** (-s / alpha), rel_tol),
    ]
    return report


def minkowski_dimension_estimate(aset: CompactSet, deltas=None, N_list=None, packing_opts=None) -> tuple[float, float]:
    """Dimension range from slopes of ``log delta_N`` against ``log N``.

    ``deltas`` may map ``N`` to a measured separation, or map a subsequence
    label to such a mapping; each subsequence yields one slope estimate
    ``-1/slope`` per consecutive pair, and the min and max are returned.
    Without ``deltas`` they are computed (exactly for self-similar sets).
    """
    if deltas is None:
        deltas = _default_deltas(aset, N_list, packing_opts)
    groups = deltas.values() if all(isinstance(v, dict) for v in deltas.values()) else [deltas]
    dims = []
    for seq in groups:
        pts = sorted(seq.items())
        for (n1, d1), (n2, d2) in zip(pts, pts[1:]):
            dims.append(-math.log(n2 / n1) / math.log(float(d2) / float(d1)))
    if not dims:
        raise ValueError("need at least two N values")
    return min(dims), max(dims)


def _default_deltas(aset, N_list, packing_opts):
    if isinstance(aset, SelfSimilar1D):
        from .cantor import exact_delta

        p = aset.ifs.p
        return {
            k: {k * p**m: exact_delta(aset.ifs, k * p**m).delta for m in range(1, 6)}
            for k in (5, 6, 7, 8)
        }
    from .packing import PackingOptions, best_packing

    # the 1/N correction in delta_N biases slopes at small N; 1-D sets are cheap enough to go further
    N_list = N_list or ([32, 64, 128, 256] if aset.intrinsic_dim == 1 else [12, 24, 48, 96])
    packing_opts = packing_opts or PackingOptions(restarts=4)
    return {N: best_packing(aset, N, packing_opts).delta for N in N_list}
