"""Exact best-packing on self-similar subsets of [0, 1].

All distances here are rationals.  The depth-``m`` cell endpoints of a
rational IFS are integers after scaling by ``D * b**m`` (``sigma = a/b``,
translations over a common denominator ``D``), which lets the maximin
problem on that finite set be solved exactly: in one dimension the greedy
left-to-right filling with separation ``d`` places the most points, so the
best separation is the largest integer ``d`` whose greedy count reaches
``N``.  Raising the depth by two and getting the same answer is the
stopping test for the value on the whole attractor.

A second, independent route exploits self-similarity directly: split ``N``
over the first-level cells, recurse, and combine (:func:`composition_delta`).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .geometry import IFSSpec


class InsufficientDepthError(RuntimeError):
    pass


class HypothesisError(ValueError):
    pass


@dataclass
class ExactPacking:
    ifs: IFSSpec
    N: int
    delta: Fraction
    witness: list
    depth: int

    def normalized(self) -> float:
        return float(self.delta) * self.N ** (1 / self.ifs.lam)


def endpoint_lattice(ifs: IFSSpec, depth: int) -> tuple[np.ndarray, int]:
    """Sorted integer endpoints of the depth-``depth`` cells and their common scale."""
    a, b = ifs.sigma.numerator, ifs.sigma.denominator
    D = math.lcm(*(t.denominator for t in ifs.translations))
    T = [int(t * D) for t in ifs.translations]
    scale = D * b**depth
    if scale >= 2**62:
        raise OverflowError("depth too large for 64-bit endpoint lattice")
    pts = np.array([0, D], dtype=np.int64)
    for m in range(1, depth + 1):
        pts = np.concatenate([Ti * b**m + a * pts for Ti in T])
    return pts, scale


def _greedy(E: np.ndarray, d: int, N: int) -> list[int]:
    """Indices picked by the left-to-right greedy filling, stopping at ``N``."""
    picked = [0]
    n = len(E)
    while len(picked) < N:
        j = int(np.searchsorted(E, E[picked[-1]] + d, side="left"))
        if j >= n:
            break
        picked.append(j)
    return picked


def delta_on_endpoints(ifs: IFSSpec, N: int, depth: int) -> tuple[Fraction, list]:
    """Exact best separation of ``N`` points chosen among depth-``depth`` endpoints."""
    E, scale = endpoint_lattice(ifs, depth)
    if N > len(E):
        raise ValueError(f"depth {depth} has only {len(E)} endpoints, fewer than N={N}")
    lo, hi = 1, int(E[-1] - E[0])
    if len(_greedy(E, hi, N)) >= N:
        lo = hi
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if len(_greedy(E, mid, N)) >= N:
            lo = mid
        else:
            hi = mid - 1
    picked = _greedy(E, lo, N)
    witness = [Fraction(int(E[i]), scale) for i in picked]
    return Fraction(lo, scale), witness


def default_depth(ifs: IFSSpec, N: int) -> int:
    return max(3, math.ceil(math.log(N) / math.log(ifs.p)) + 3)


def exact_delta(ifs: IFSSpec, N: int, depth: int | None = None) -> ExactPacking:
    """Best-packing distance of ``N`` points on the attractor, as a rational.

    The value on the depth-``depth`` endpoints must agree with the value two
    levels deeper; otherwise :class:`InsufficientDepthError` is raised.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    depth = default_depth(ifs, N) if depth is None else depth
    if N > 2 * ifs.p**depth:
        raise InsufficientDepthError(f"depth {depth} cannot hold {N} points")
    delta, witness = delta_on_endpoints(ifs, N, depth)
    deeper, _ = delta_on_endpoints(ifs, N, depth + 2)
    if deeper != delta:
        raise InsufficientDepthError(
            f"delta_{N} changed from {delta} to {deeper} between depths {depth} and {depth + 2}"
        )
    return ExactPacking(ifs, N, delta, witness, depth)


def brute_force_delta(ifs: IFSSpec, N: int, depth: int, max_subsets: int = 2_000_000) -> Fraction:
    """Exhaustive maximin over ``N``-subsets of the depth-``depth`` endpoints.

    Enumerates subsets outright when there are at most ``max_subsets`` of
    them, otherwise runs the equivalent exhaustive recursion over sorted
    points (best chain of ``c`` points ending at each index).
    """
    E, scale = endpoint_lattice(ifs, depth)
    pts = [int(v) for v in E]
    if math.comb(len(pts), N) <= max_subsets:
        best = max(min(b - a for a, b in zip(sub, sub[1:])) for sub in combinations(pts, N))
        return Fraction(best, scale)
    n = len(pts)
    INF = float("inf")
    # chain[c][j]: best separation of c points, sorted, ending at index j
    chain = [[INF] * n]
    for c in range(2, N + 1):
        prev = chain[-1]
        row = [-INF] * n
        for j in range(n):
            best = -INF
            for i in range(j):
                v = min(prev[i], pts[j] - pts[i])
                if v > best:
                    best = v
            row[j] = best
        chain.append(row)
    return Fraction(int(max(chain[-1])), scale)


def _compositions(n: int, p: int):
    if p == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, p - 1):
            yield (first,) + rest


def composition_delta(ifs: IFSSpec, N: int) -> Fraction:
    """Maximin over splits ``(n_1, ..., n_p)`` of ``N`` among the first-level cells.

    Each cell holding ``n_i >= 2`` points carries a scaled optimal
    configuration that uses both cell endpoints; a lone point sits at
    whichever endpoint of its cell serves the neighboring gaps best.  The
    result is the separation of an explicit configuration, hence a lower
    bound on the exact value; tests check it against :func:`exact_delta`.
    """
    sigma = ifs.sigma
    t = ifs.translations
    p = ifs.p

    @lru_cache(maxsize=None)
    def best(n: int) -> Fraction:
        result = Fraction(-1)
        for comp in _compositions(n, p):
            occupied = [i for i in range(p) if comp[i]]
            if len(occupied) < 2:
                continue
            within = min((sigma * best(comp[i]) for i in occupied if comp[i] >= 2), default=None)
            if within is not None and within <= result:
                continue
            # chain over occupied cells; state: position of last point -> best cross gap so far
            states: dict = {}
            for i in occupied:
                lo, hi = t[i], t[i] + sigma
                options = [(lo, hi)] if comp[i] >= 2 else [(lo, lo), (hi, hi)]
                nxt: dict = {}
                for first, last in options:
                    if not states:
                        cand = {last: None}
                    else:
                        cand = {}
                        for prev_last, gap in states.items():
                            g = first - prev_last
                            g = g if gap is None else min(gap, g)
                            if last not in cand or cand[last] < g:
                                cand[last] = g
                    for key, g in cand.items():
                        if key not in nxt or (g is not None and (nxt[key] is None or nxt[key] < g)):
                            nxt[key] = g
                states = nxt
            cross = max(g for g in states.values() if g is not None)
            value = cross if within is None else min(within, cross)
            if value > result:
                result = value
        return result

    if N < 2:
        raise ValueError("N must be >= 2")
    for n in range(2, N):
        best(n)
    return best(N)


@dataclass
class OscillationReport:
    ifs: IFSSpec
    k: int
    m_range: list
    delta_k: Fraction
    along_kpm: list  # (m, N, delta, normalized)
    along_cm: list
    limit_kpm: float
    limit_cm: float
    ratio: float
    expected_ratio: float = field(init=False)

    def __post_init__(self):
        self.expected_ratio = (self.k / (self.k - 1)) ** (1 / self.ifs.lam)

    def rows(self) -> list:
        out = []
        for tag, seq in (("kpm", self.along_kpm), ("cm", self.along_cm)):
            for m, N, delta, value in seq:
                out.append([m, N, delta.numerator, delta.denominator, value, tag])
        out.append(["inf", "", "", "", self.limit_kpm, "kpm_limit"])
        out.append(["inf", "", "", "", self.limit_cm, "cm_limit"])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "N", "delta_num", "delta_den", "normalized_value", "subsequence_tag"])
        for row in self.rows():
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
        return buf.getvalue()


def smallest_valid_k(ifs: IFSSpec, limit: int = 64) -> int:
    h = ifs.gap
    for k in range(2, limit + 1):
        if exact_delta(ifs, k).delta < h:
            return k
    raise HypothesisError(f"no k <= {limit} has delta_k < gap {h}")


def subsequence_oscillation(ifs: IFSSpec, k: int, m_max: int) -> OscillationReport:
    """Exact separations along ``N = k p^m`` and ``N = (k-1) p^m + 1``.

    Both equal ``sigma**m * delta_k`` exactly once ``delta_k`` is below the
    first-level gap, so the normalized sequences ``delta_N N**(1/lambda)``
    tend to ``delta_k k**(1/lambda)`` and ``delta_k (k-1)**(1/lambda)``.
    """
    if k < 2 or m_max < 1:
        raise ValueError("need k >= 2 and m_max >= 1")
    delta_k = exact_delta(ifs, k).delta
    if not delta_k < ifs.gap:
        raise HypothesisError(
            f"delta_{k} = {delta_k} is not below the gap {ifs.gap}; "
            f"smallest valid k is {smallest_valid_k(ifs)}"
        )
    inv = 1 / ifs.lam
    p, sigma = ifs.p, ifs.sigma
    along_kpm, along_cm = [], []
    for m in range(1, m_max + 1):
        target = sigma**m * delta_k
        for N, seq in ((k * p**m, along_kpm), ((k - 1) * p**m + 1, along_cm)):
            d = exact_delta(ifs, N).delta
            if d != target:
                raise AssertionError(f"delta_{N} = {d}, expected sigma^{m} delta_{k} = {target}")
            seq.append((m, N, d, float(d) * N**inv))
    limit_kpm = float(delta_k) * k**inv
    limit_cm = float(delta_k) * (k - 1) ** inv
    return OscillationReport(
        ifs, k, list(range(1, m_max + 1)), delta_k, along_kpm, along_cm,
        limit_kpm, limit_cm, limit_kpm / limit_cm,
    )
