"""Riesz s-energy of point configurations and its constrained minimization.

The energy of ``N`` points is the sum over *ordered* pairs ``i != j`` of
``|y_i - y_j|**-s``.  Minimization runs projected gradient descent with
Barzilai-Borwein steps and a halving line search from several random starts;
on self-similar sets (totally disconnected) it runs a discrete exchange over
the cell endpoints instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .geometry import CompactSet, SelfSimilar1D, set_from_dict


class InfiniteEnergyError(ValueError):
    """Two points of a configuration coincide."""

    def __init__(self, i: int, j: int):
        super().__init__(f"infinite energy: points {i} and {j} coincide")
        self.pair = (i, j)


@dataclass(eq=False)
class Configuration:
    """``N`` points of ``R^{d'}`` that live on ``set``."""

    set: CompactSet
    points: np.ndarray

    def __post_init__(self):
        self.points = self.set.check_points(self.points)

    @property
    def N(self) -> int:
        return len(self.points)

    def validate(self, tol: float = 1e-9) -> None:
        if self.N < 2:
            raise ValueError("a configuration needs at least two points")
        off = self.set.distance(self.points)
        if np.any(off > tol):
            raise ValueError(f"point {int(np.argmax(off))} is {off.max():.3g} off the set")
        _check_distinct(self.points)

    def to_dict(self) -> dict:
        return {"set": self.set.to_dict(), "N": self.N, "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Configuration":
        return cls(set_from_dict(data["set"]), np.array(data["points"], dtype=float))


def _points(config) -> np.ndarray:
    if isinstance(config, Configuration):
        return config.points
    X = np.asarray(config, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def _check_distinct(X: np.ndarray) -> None:
    d = pdist(X)
    if len(d) and d.min() == 0.0:
        i, j = np.argwhere(squareform(d) + np.eye(len(X)) == 0.0)[0]
        raise InfiniteEnergyError(int(i), int(j))


def riesz_energy(config, s: float) -> float:
    """``sum_{i != j} |y_i - y_j|**-s`` over ordered pairs."""
    if s <= 0:
        raise ValueError("s must be positive")
    X = _points(config)
    _check_distinct(X)
    with np.errstate(over="ignore"):
        return 2.0 * float(np.sum(pdist(X) ** -s))


def _energy_and_grad(X: np.ndarray, s: float, scale: float = 1.0):
    """Energy of ``X / scale`` and its gradient with respect to ``X``."""
    diff = X[:, None, :] - X[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, np.inf)
    with np.errstate(over="ignore", divide="ignore"):
        terms = (r2 / scale**2) ** (-s / 2)
        energy = float(terms.sum())
        coef = terms / r2
        grad = -2.0 * s * np.einsum("ij,ijk->ik", coef, diff)
    return energy, grad


def riesz_gradient(config, s: float) -> np.ndarray:
    """``dE/dy_i = -2s sum_{j != i} (y_i - y_j) |y_i - y_j|**(-s-2)``."""
    X = _points(config)
    _check_distinct(X)
    return _energy_and_grad(X, s)[1]


@dataclass
class OptimizerOptions:
    """Knobs for :func:`minimize_energy`.

    ``grad_tol`` bounds the scale-free stationarity measure
    ``max_i |tangent gradient_i| * diameter / (s * E)``.
    """

    restarts: int = 16
    max_iter: int | None = None
    seed: int = 0
    grad_tol: float = 1e-9
    rel_tol: float = 1e-13
    stall_iters: int = 50
    min_separation: float = 1e-14
    candidate_depth: int | None = None

    def iterations_for(self, N: int) -> int:
        return self.max_iter if self.max_iter is not None else 200 * N


@dataclass(eq=False)
class EnergyReport:
    config: Configuration
    s: float
    energy: float
    iterations: int
    converged: bool
    restarts_used: int

    def to_dict(self) -> dict:
        return {
            "set": self.config.set.to_dict(),
            "s": self.s,
            "N": self.config.N,
            "energy": self.energy,
            "points": self.config.points.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
        }


@dataclass
class _Descent:
    X: np.ndarray
    energy: float  # scaled
    scale: float
    iterations: int
    converged: bool


def _descend(aset: CompactSet, X0: np.ndarray, s: float, max_iter: int, opts: OptimizerOptions) -> _Descent:
    X = aset.project(X0)
    scale = float(pdist(X).min())
    if scale <= 0:
        raise InfiniteEnergyError(*_first_coincident(X))
    diam = aset.diameter
    f, G = _energy_and_grad(X, s, scale)
    T = aset.tangent(X, G)
    tnorm = np.linalg.norm(T, axis=1).max()
    step = 0.1 * scale / tnorm if tnorm > 0 else 0.0
    quiet = 0
    for it in range(1, max_iter + 1):
        if tnorm == 0 or tnorm * diam / (s * f) < opts.grad_tol:
            return _Descent(X, f, scale, it - 1, True)
        trial = step
        while True:
            Xt = aset.project(X - trial * T)
            if pdist(Xt).min() > opts.min_separation:
                ft, Gt = _energy_and_grad(Xt, s, scale)
                if ft < f:
                    break
            trial *= 0.5
            if trial * tnorm < 1e-16 * diam:
                # no representable decrease left along the projected gradient
                return _Descent(X, f, scale, it - 1, True)
        Tt = aset.tangent(Xt, Gt)
        dx, dg = Xt - X, Tt - T
        sy = float(np.sum(dx * dg))
        step = float(np.sum(dx * dx)) / sy if sy > 0 else 2.0 * trial
        step = min(step, diam / max(np.linalg.norm(Tt, axis=1).max(), 1e-300))
        quiet = quiet + 1 if (f - ft) <= opts.rel_tol * f else 0
        X, f, T = Xt, ft, Tt
        tnorm = np.linalg.norm(T, axis=1).max()
        if quiet >= opts.stall_iters:
            return _Descent(X, f, scale, it, True)
    return _Descent(X, f, scale, max_iter, False)


def _first_coincident(X):
    try:
        _check_distinct(X)
    except InfiniteEnergyError as err:
        return err.pair
    return (0, 0)


def _candidate_depth(aset: SelfSimilar1D, N: int, opts: OptimizerOptions) -> int:
    if opts.candidate_depth is not None:
        return opts.candidate_depth
    need = math.ceil(math.log(max(N, 2)) / math.log(aset.ifs.p)) + 4
    return min(aset.depth, need)


def _exchange(cands: np.ndarray, idx: np.ndarray, s: float, max_sweeps: int) -> tuple[np.ndarray, int, bool]:
    """Relocate one point at a time to the candidate of least potential."""
    idx = idx.copy()
    for sweep in range(1, max_sweeps + 1):
        moved = False
        scale = float(pdist(cands[idx][:, None]).min())
        for i in range(len(idx)):
            others = np.delete(cands[idx], i)
            with np.errstate(over="ignore", divide="ignore"):
                pot = (np.abs(cands[:, None] - others[None, :]) / scale) ** -s
                pot = pot.sum(axis=1)
            pot[idx] = np.inf
            best = int(np.argmin(pot))
            with np.errstate(over="ignore", divide="ignore"):
                current = float(np.sum((np.abs(cands[idx[i]] - others) / scale) ** -s))
            if pot[best] < current * (1 - 1e-14):
                idx[i] = best
                moved = True
        if not moved:
            return idx, sweep, True
    return idx, max_sweeps, False


def _minimize_discrete(aset: SelfSimilar1D, N: int, s: float, opts: OptimizerOptions, init=None) -> EnergyReport:
    cands = aset.candidates(_candidate_depth(aset, N, opts))
    if N > len(cands):
        raise ValueError("not enough candidate points; raise candidate_depth")
    rng = np.random.default_rng(opts.seed)
    starts = []
    if init is not None:
        x0 = _points(init)[:, 0]
        starts.append(_snap(cands, x0))
    starts += [rng.choice(len(cands), size=N, replace=False) for _ in range(opts.restarts)]
    best = None
    total = 0
    for idx0 in starts:
        idx, sweeps, ok = _exchange(cands, idx0, s, max(opts.iterations_for(N) // N, 10))
        total += sweeps
        X = np.sort(cands[idx])[:, None]
        e = riesz_energy(X, s)
        if best is None or e < best[0]:
            best = (e, X, ok)
    e, X, ok = best
    return EnergyReport(Configuration(aset, X), s, e, total, ok, len(starts))


def _snap(cands: np.ndarray, x: np.ndarray) -> np.ndarray:
    idx = []
    taken = set()
    for v in x:
        order = np.argsort(np.abs(cands - v))
        k = next(int(j) for j in order if int(j) not in taken)
        taken.add(k)
        idx.append(k)
    return np.array(idx)


def minimize_energy(aset: CompactSet, N: int, s: float, opts: OptimizerOptions | None = None, init=None) -> EnergyReport:
    """Best local minimum of the s-energy of ``N`` points on ``aset``.

    Runs ``opts.restarts`` descents from uniform samples (plus one from
    ``init`` if given) and keeps the lowest energy.  A descent that runs out
    of iterations is reported with ``converged=False``.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if s <= 0:
        raise ValueError("s must be positive")
    opts = opts or OptimizerOptions()
    if isinstance(aset, SelfSimilar1D):
        return _minimize_discrete(aset, N, s, opts, init)
    rng = np.random.default_rng(opts.seed)
    starts = [] if init is None else [_points(init)]
    starts += [aset.sample(rng, N) for _ in range(opts.restarts)]
    best = None
    total = 0
    for X0 in starts:
        run = _descend(aset, X0, s, opts.iterations_for(N), opts)
        total += run.iterations
        e = riesz_energy(run.X, s)
        if best is None or e < best[0]:
            best = (e, run)
    e, run = best
    return EnergyReport(Configuration(aset, run.X), s, e, total, run.converged, len(starts))


def energy_upper_constant(s: float, ambient_dim: int, terms: int = 100000) -> float:
    """``4 d' sum_k (2k+3)**(d'-1) k**-s``: the computable packing-to-energy factor.

    Any configuration with separation ``a`` has point potentials at most this
    constant times ``a**-s``.  The series converges for ``s > d'``.
    """
    if s <= ambient_dim:
        raise ValueError("the bound needs s > ambient dimension")
    k = np.arange(1, terms + 1, dtype=float)
    head = float(np.sum((2 * k + 3) ** (ambient_dim - 1) * k**-s))
    # integral tail of (2k+3)^(d'-1) k^-s <= (5k)^(d'-1) k^-s past the cutoff
    tail = 5.0 ** (ambient_dim - 1) * terms ** (ambient_dim - s) / (s - ambient_dim)
    return 4 * ambient_dim * (head + tail)
