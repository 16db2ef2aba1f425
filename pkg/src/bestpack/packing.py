"""Best-packing configurations and volume-based certificates.

``best_packing`` warm-starts an increasing schedule of Riesz exponents (large
``s`` energy minima approach maximin configurations) and then polishes the
result one point at a time.  The reported separation is always realized by
the returned configuration, so it is a certified lower bound on the
best-packing distance; upper bounds come only from neighborhood volumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .energy import (
    Configuration,
    OptimizerOptions,
    _candidate_depth,
    _descend,
    _exchange,
    _points,
)
from .geometry import CompactSet, SelfSimilar1D, ball_volume


class PreconditionError(ValueError):
    """A certificate's hypothesis fails for the given parameters."""


def min_pairwise_distance(config) -> float:
    """Smallest distance over all pairs, by direct O(N^2) comparison."""
    X = _points(config)
    if len(X) < 2:
        raise ValueError("need at least two points")
    return float(pdist(X).min())


@dataclass
class PackingOptions:
    restarts: int = 16
    schedule: tuple = (8, 16, 32, 64)
    seed: int = 0
    polish_tol: float = 1e-10
    max_polish_moves: int | None = None
    energy: OptimizerOptions = field(default_factory=OptimizerOptions)


@dataclass(eq=False)
class PackingReport:
    config: Configuration
    delta: float
    method: str
    lower_bound_certified: bool = True
    restarts_used: int = 0

    def to_dict(self) -> dict:
        return {
            "set": self.config.set.to_dict(),
            "N": self.config.N,
            "delta": self.delta,
            "method": self.method,
            "lower_bound_certified": self.lower_bound_certified,
            "restarts_used": self.restarts_used,
            "points": self.config.points.tolist(),
        }


def _nearest(D: np.ndarray) -> np.ndarray:
    return D.min(axis=1)


_STEP_FACTORS = 0.5 ** np.arange(45)


def _best_move(aset: CompactSet, X: np.ndarray, D: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    phi = D[k].min()
    x = X[k]
    active = np.flatnonzero(D[k] <= phi * (1 + 1e-6) + 1e-15)
    nearest = int(np.argmin(D[k]))
    directions = []
    for group in (active, [nearest]):
        u = np.sum((x - X[group]) / D[k, group][:, None], axis=0)
        if aset.ambient_dim > 1 and aset.kind in ("circle", "sphere2"):
            n = x / np.linalg.norm(x)
            u = u - np.dot(u, n) * n
        norm = np.linalg.norm(u)
        if norm > 1e-14:
            directions.append(u / norm)
    if not directions:
        return x, phi
    steps = phi * _STEP_FACTORS[:, None, None] * np.array(directions)[None, :, :]
    Y = aset.project((x + steps).reshape(-1, len(x)))
    dist = np.sqrt(((Y[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
    dist[:, k] = np.inf
    sep = dist.min(axis=1)
    j = int(np.argmax(sep))
    if sep[j] > phi:
        return Y[j], float(sep[j])
    return x, phi


def _best_move_discrete(cands: np.ndarray, X: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    others = np.delete(X[:, 0], k)
    sep = np.abs(cands[:, None] - others[None, :]).min(axis=1)
    j = int(np.argmax(sep))
    return np.array([cands[j]]), float(sep[j])


def maximin_polish(aset: CompactSet, X: np.ndarray, tol: float = 1e-10, max_moves: int | None = None,
                   candidates: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Move worst points one at a time while their nearest distance grows by more than ``tol``.

    Points are tried in order of nearest-neighbor distance, lowest index
    first among ties.  The global separation never decreases.
    """
    X = np.array(X, dtype=float)
    N = len(X)
    max_moves = 200 * N if max_moves is None else max_moves
    D = squareform(pdist(X))
    np.fill_diagonal(D, np.inf)
    moves = 0
    while moves < max_moves:
        nn = _nearest(D)
        delta = nn.min()
        tight = np.flatnonzero(nn <= delta + tol)
        order = sorted(tight, key=lambda i: (nn[i], i))
        for k in order:
            if candidates is not None:
                y, phi = _best_move_discrete(candidates, X, k)
            else:
                y, phi = _best_move(aset, X, D, k)
            if phi > nn[k] + tol:
                X[k] = y
                row = np.linalg.norm(X - y, axis=1)
                row[k] = np.inf
                D[k, :] = row
                D[:, k] = row
                moves += 1
                break
        else:
            break
    return X, moves


def _schedule_descent(aset, X, schedule, opts: PackingOptions):
    eopts = opts.energy
    N = len(X)
    for s in schedule:
        X = _descend(aset, X, float(s), eopts.iterations_for(N), eopts).X
    return X


def _schedule_discrete(aset: SelfSimilar1D, idx, cands, schedule, opts: PackingOptions):
    N = len(idx)
    for s in schedule:
        idx, _, _ = _exchange(cands, idx, float(s), max(opts.energy.iterations_for(N) // N, 10))
    return idx


def best_packing(aset: CompactSet, N: int, opts: PackingOptions | None = None, init=None) -> PackingReport:
    """Largest separation found for ``N`` points on ``aset`` over all restarts."""
    if N < 2:
        raise ValueError("N must be >= 2")
    opts = opts or PackingOptions()
    rng = np.random.default_rng(opts.seed)
    discrete = isinstance(aset, SelfSimilar1D)
    cands = aset.candidates(_candidate_depth(aset, N, opts.energy)) if discrete else None
    starts = [] if init is None else [_points(init)]
    if discrete:
        starts += [cands[rng.choice(len(cands), size=N, replace=False)][:, None] for _ in range(opts.restarts)]
    else:
        starts += [aset.sample(rng, N) for _ in range(opts.restarts)]
    best = None
    for X0 in starts:
        if discrete:
            idx0 = np.searchsorted(cands, np.sort(X0[:, 0]))
            idx0 = np.clip(idx0, 0, len(cands) - 1)
            if len(set(idx0.tolist())) < N:
                idx0 = rng.choice(len(cands), size=N, replace=False)
            X = cands[_schedule_discrete(aset, idx0, cands, opts.schedule, opts)][:, None]
        else:
            X = _schedule_descent(aset, X0, opts.schedule, opts)
        before = min_pairwise_distance(X)
        X, moves = maximin_polish(aset, X, opts.polish_tol, opts.max_polish_moves, cands)
        delta = min_pairwise_distance(X)
        method = "polish" if delta > before else "schedule"
        if best is None or delta > best[0]:
            best = (delta, X, method)
    delta, X, method = best
    if discrete:
        X = np.sort(X, axis=0)
    return PackingReport(Configuration(aset, X), delta, method, True, len(starts))


def certify_packing_upper_bound(aset: CompactSet, rho: float, gamma: float, alpha: float,
                                volume: float | None = None) -> int:
    """Threshold ``N0`` with ``delta_N(A) <= 2 rho`` for every ``N >= N0``.

    Requires ``vol(A(rho)) < gamma * rho**(d' - alpha)`` and
    ``rho < (gamma / beta_{d'})**(1/alpha)``; ``N0 = floor(gamma / (beta_{d'} rho**alpha)) + 1``.
    """
    from .minkowski import neighborhood_volume

    dim = aset.ambient_dim
    if rho <= 0 or gamma <= 0 or not 0 < alpha <= dim:
        raise PreconditionError("need rho > 0, gamma > 0 and 0 < alpha <= ambient dimension")
    beta = ball_volume(dim)
    if not rho < (gamma / beta) ** (1 / alpha):
        raise PreconditionError(f"rho={rho} is not below (gamma/beta)^(1/alpha)")
    if volume is None:
        est = neighborhood_volume(aset, rho)
        volume = est.volume + 3 * est.stderr
    bound = gamma * rho ** (dim - alpha)
    if not volume < bound:
        raise PreconditionError(
            f"volume hypothesis fails: vol(A({rho})) = {volume:.6g} >= gamma*rho^(d'-alpha) = {bound:.6g}"
        )
    return math.floor(gamma / (beta * rho**alpha)) + 1


def greedy_lower_bound(aset: CompactSet, rho: float, seed: int = 0, budget: int = 20000) -> tuple[int, Configuration]:
    """Farthest-point greedy filling with separation at least ``rho``.

    The returned ``k`` points certify ``delta_k(A) >= rho``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if isinstance(aset, SelfSimilar1D):
        pool = aset.candidates()[:, None]
    else:
        pool = aset.sample(np.random.default_rng(seed), budget)
    center = pool.mean(axis=0)
    first = int(np.argmax(np.linalg.norm(pool - center, axis=1)))
    chosen = [first]
    dist = np.linalg.norm(pool - pool[first], axis=1)
    while True:
        j = int(np.argmax(dist))
        if dist[j] < rho:
            break
        chosen.append(j)
        dist = np.minimum(dist, np.linalg.norm(pool - pool[j], axis=1))
    return len(chosen), Configuration(aset, pool[chosen])
