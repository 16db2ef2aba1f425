"""Catalog of compact sets and point operations on them.

Every set knows its ambient dimension, its intrinsic dimension and (when it
is finite and known) its Hausdorff measure, normalized so that a unit cube of
the intrinsic dimension has measure one.  Points are always handled as float
arrays of shape ``(n, ambient_dim)``.

Self-similar subsets of ``[0, 1]`` are described by an :class:`IFSSpec` and
handled at a finite depth ``m``: the depth-``m`` truncation is the union of the
``p**m`` closed cells ``F_i([0, 1])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar, Sequence, Union

import numpy as np

DEFAULT_TOL = 1e-12
DEFAULT_IFS_DEPTH = 12


class UnknownSetKindError(ValueError):
    pass


class DimensionError(ValueError):
    """A point does not have the ambient dimension of its set."""


def ball_volume(alpha: float) -> float:
    """Volume of the unit ball, extended to real ``alpha >= 0``."""
    return math.pi ** (alpha / 2) / math.gamma(1 + alpha / 2)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


# ---------------------------------------------------------------------------
# Iterated function systems on [0, 1]
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IFSSpec:
    """``p`` similitudes ``S_i(x) = t_i + sigma * x`` with disjoint images.

    The translations are the left endpoints of the child cells, sorted, with
    the first cell starting at 0 and the last one ending at 1, so the
    attractor spans exactly ``[0, 1]``.
    """

    p: int
    sigma: Fraction
    translations: tuple

    def __post_init__(self):
        sigma = as_fraction(self.sigma)
        trans = tuple(as_fraction(t) for t in self.translations)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "translations", trans)
        if self.p < 2:
            raise ValueError("an IFS needs p >= 2 similitudes")
        if not 0 < sigma < 1:
            raise ValueError("sigma must lie in (0, 1)")
        if len(trans) != self.p:
            raise ValueError(f"expected {self.p} translations, got {len(trans)}")
        if trans[0] != 0 or trans[-1] + sigma != 1:
            raise ValueError("child cells must start at 0 and end at 1")
        if any(trans[i + 1] - trans[i] - sigma <= 0 for i in range(self.p - 1)):
            raise ValueError("child cells must be pairwise disjoint and sorted")

    @classmethod
    def cantor(cls) -> "IFSSpec":
        return cls(2, Fraction(1, 3), (Fraction(0), Fraction(2, 3)))

    @classmethod
    def uniform(cls, p: int, sigma) -> "IFSSpec":
        """``p`` equally spaced cells of length ``sigma`` spanning ``[0, 1]``."""
        sigma = as_fraction(sigma)
        step = (1 - sigma) / (p - 1)
        return cls(p, sigma, tuple(i * step for i in range(p)))

    @property
    def lam(self) -> float:
        """Similarity dimension ``-log p / log sigma``."""
        return math.log(self.p) / -math.log(self.sigma)

    @property
    def gap(self) -> Fraction:
        """Smallest distance between two distinct first-level cells."""
        return min(
            self.translations[i + 1] - self.translations[i] - self.sigma
            for i in range(self.p - 1)
        )

    def child_gaps(self) -> list[Fraction]:
        return [
            self.translations[i + 1] - self.translations[i] - self.sigma
            for i in range(self.p - 1)
        ]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "sigma": str(self.sigma),
            "translations": [str(t) for t in self.translations],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IFSSpec":
        return cls(int(data["p"]), data["sigma"], tuple(data["translations"]))


def ifs_evaluate(ifs: IFSSpec, address: Sequence[int]) -> Fraction:
    """Left endpoint of the cell ``S_{i1} o ... o S_{im}([0, 1])``, exactly."""
    x = Fraction(0)
    for i in reversed(address):
        if not 0 <= i < ifs.p:
            raise ValueError(f"address symbol {i} outside [0, {ifs.p})")
        x = ifs.translations[i] + ifs.sigma * x
    return x


def ifs_cell_endpoints(ifs: IFSSpec, depth: int) -> np.ndarray:
    """Sorted float array of both endpoints of every depth-``depth`` cell."""
    sigma = float(ifs.sigma)
    t = np.array([float(v) for v in ifs.translations])
    pts = np.array([0.0, 1.0])
    for _ in range(depth):
        pts = (t[:, None] + sigma * pts[None, :]).ravel()
    return pts


def ifs_address_points(ifs: IFSSpec, addresses: np.ndarray) -> np.ndarray:
    """Left endpoints for an integer array of addresses, shape ``(n, m)``."""
    sigma = float(ifs.sigma)
    t = np.array([float(v) for v in ifs.translations])
    m = addresses.shape[1]
    weights = sigma ** np.arange(m)
    return t[addresses] @ weights


# ---------------------------------------------------------------------------
# Set catalog
# ---------------------------------------------------------------------------


class CompactSet:
    """Shared behavior of the catalog sets; subclasses are frozen dataclasses."""

    kind: ClassVar[str]
    ambient_dim: int
    intrinsic_dim: float

    @property
    def hausdorff_measure(self) -> float | None:
        return None

    def project(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def tangent(self, X: np.ndarray, G: np.ndarray) -> np.ndarray:
        """Component of the ambient gradient ``G`` that descent can follow."""
        return G

    def bounding_box(self, pad: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def check_points(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 0:
            X = X.reshape(1, 1)
        elif X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.ambient_dim:
            raise DimensionError(
                f"{self.kind} lives in R^{self.ambient_dim}, got points of length {X.shape[-1]}"
            )
        return X


@dataclass(frozen=True)
class Interval(CompactSet):
    a: float = 0.0
    b: float = 1.0

    kind: ClassVar[str] = "interval"
    ambient_dim: ClassVar[int] = 1
    intrinsic_dim: ClassVar[float] = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("Interval requires a < b")

    @property
    def hausdorff_measure(self):
        return self.b - self.a

    @property
    def diameter(self):
        return self.b - self.a

    def project(self, X):
        return np.clip(X, self.a, self.b)

    def distance(self, X):
        x = X[:, 0]
        return np.maximum(np.maximum(self.a - x, x - self.b), 0.0)

    def sample(self, rng, count):
        return rng.uniform(self.a, self.b, size=(count, 1))

    def tangent(self, X, G):
        return _box_tangent(X, G, self.a, self.b)

    def bounding_box(self, pad=0.0):
        return np.array([self.a - pad]), np.array([self.b + pad])

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Cube(CompactSet):
    """The unit cube ``[0, 1]^d`` as a full-dimensional subset of ``R^d``."""

    d: int = 2

    kind: ClassVar[str] = "cube"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("Cube requires d >= 1")

    @property
    def ambient_dim(self):
        return self.d

    @property
    def intrinsic_dim(self):
        return self.d

    @property
    def hausdorff_measure(self):
        return 1.0

    @property
    def diameter(self):
        return math.sqrt(self.d)

    def project(self, X):
        return np.clip(X, 0.0, 1.0)

    def distance(self, X):
        return np.linalg.norm(X - np.clip(X, 0.0, 1.0), axis=1)

    def sample(self, rng, count):
        return rng.uniform(0.0, 1.0, size=(count, self.d))

    def tangent(self, X, G):
        return _box_tangent(X, G, 0.0, 1.0)

    def bounding_box(self, pad=0.0):
        return np.full(self.d, -pad), np.full(self.d, 1.0 + pad)

    def to_dict(self):
        return {"kind": self.kind, "d": self.d}


@dataclass(frozen=True)
class Circle(CompactSet):
    radius: float = 1.0

    kind: ClassVar[str] = "circle"
    ambient_dim: ClassVar[int] = 2
    intrinsic_dim: ClassVar[float] = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def hausdorff_measure(self):
        return 2 * math.pi * self.radius

    @property
    def diameter(self):
        return 2 * self.radius

    def project(self, X):
        return _radial_project(X, self.radius)

    def distance(self, X):
        return np.abs(np.linalg.norm(X, axis=1) - self.radius)

    def sample(self, rng, count):
        theta = rng.uniform(0.0, 2 * math.pi, size=count)
        return self.radius * np.column_stack([np.cos(theta), np.sin(theta)])

    def tangent(self, X, G):
        return _normal_removed(X, G)

    def bounding_box(self, pad=0.0):
        r = self.radius + pad
        return np.full(2, -r), np.full(2, r)

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius}


@dataclass(frozen=True)
class Sphere2(CompactSet):
    radius: float = 1.0

    kind: ClassVar[str] = "sphere2"
    ambient_dim: ClassVar[int] = 3
    intrinsic_dim: ClassVar[float] = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def hausdorff_measure(self):
        return 4 * math.pi * self.radius**2

    @property
    def diameter(self):
        return 2 * self.radius

    def project(self, X):
        return _radial_project(X, self.radius)

    def distance(self, X):
        return np.abs(np.linalg.norm(X, axis=1) - self.radius)

    def sample(self, rng, count):
        # normalized Gaussians are uniform on the sphere
        g = rng.standard_normal(size=(count, 3))
        return self.radius * g / np.linalg.norm(g, axis=1, keepdims=True)

    def tangent(self, X, G):
        return _normal_removed(X, G)

    def bounding_box(self, pad=0.0):
        r = self.radius + pad
        return np.full(3, -r), np.full(3, r)

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius}


@dataclass(frozen=True)
class SelfSimilar1D(CompactSet):
    ifs: IFSSpec = field(default_factory=IFSSpec.cantor)
    depth: int = DEFAULT_IFS_DEPTH

    kind: ClassVar[str] = "self_similar"
    ambient_dim: ClassVar[int] = 1

    @property
    def intrinsic_dim(self):
        return self.ifs.lam

    @property
    def diameter(self):
        return 1.0

    @property
    def truncation_error(self) -> float:
        return float(self.ifs.sigma) ** self.depth

    def _nearest(self, x: float) -> float:
        sigma = float(self.ifs.sigma)
        t = [float(v) for v in self.ifs.translations]
        offset, scale = 0.0, 1.0
        for _ in range(self.depth):
            u = (x - offset) / scale
            if u <= 0.0:
                return offset
            if u >= 1.0:
                return offset + scale
            for i in range(self.ifs.p):
                if u <= t[i] + sigma:
                    break
            if u >= t[i]:
                offset += scale * t[i]
                scale *= sigma
                continue
            # u sits in the gap between cell i-1 and cell i; ties go left
            left, right = t[i - 1] + sigma, t[i]
            go_left = (u - left) - (right - u) <= DEFAULT_TOL
            return offset + scale * (left if go_left else right)
        return min(max(x, offset), offset + scale)

    def project(self, X):
        return np.array([[self._nearest(x)] for x in X[:, 0]])

    def distance(self, X):
        return np.abs(X[:, 0] - self.project(X)[:, 0])

    def sample(self, rng, count):
        addresses = rng.integers(0, self.ifs.p, size=(count, self.depth))
        return ifs_address_points(self.ifs, addresses)[:, None]

    def bounding_box(self, pad=0.0):
        return np.array([-pad]), np.array([1.0 + pad])

    def candidates(self, depth: int | None = None) -> np.ndarray:
        """Cell endpoints at the given depth; all of them lie on the set."""
        return ifs_cell_endpoints(self.ifs, self.depth if depth is None else depth)

    def to_dict(self):
        return {"kind": self.kind, **self.ifs.to_dict(), "depth": self.depth}


CompactSetSpec = Union[Interval, Circle, Sphere2, Cube, SelfSimilar1D]


def _box_tangent(X, G, lo, hi):
    G = G.copy()
    # descent moves along -G; freeze coordinates pinned against the box
    G[(X <= lo) & (G > 0)] = 0.0
    G[(X >= hi) & (G < 0)] = 0.0
    return G


def _normal_removed(X, G):
    n = X / np.linalg.norm(X, axis=1, keepdims=True)
    return G - np.sum(G * n, axis=1, keepdims=True) * n


def _radial_project(X, radius):
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    out = X.copy()
    ok = norms[:, 0] > 0
    out[ok] = radius * X[ok] / norms[ok]
    # the origin has no nearest point; pick a fixed direction
    out[~ok] = 0.0
    out[~ok, 0] = radius
    return out


# ---------------------------------------------------------------------------
# Functional interface
# ---------------------------------------------------------------------------


def project(aset: CompactSet, x) -> np.ndarray:
    """Nearest point of ``aset`` (its depth truncation for IFS sets) to ``x``."""
    X = aset.check_points(x)
    out = aset.project(X)
    return out if np.ndim(x) == 2 else out[0]


def distance_to_set(aset: CompactSet, x) -> float | np.ndarray:
    X = aset.check_points(x)
    d = aset.distance(X)
    return d if np.ndim(x) == 2 else float(d[0])


def sample(aset: CompactSet, rng_seed, count: int) -> np.ndarray:
    """``count`` points distributed uniformly with respect to the set's measure.

    ``rng_seed`` is either an integer seed or a ``numpy.random.Generator``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return aset.sample(rng, count)


def set_from_dict(data: dict) -> CompactSet:
    kind = data.get("kind")
    if kind == "interval":
        return Interval(float(data.get("a", 0.0)), float(data.get("b", 1.0)))
    if kind == "circle":
        return Circle(float(data.get("radius", 1.0)))
    if kind in ("sphere2", "sphere"):
        return Sphere2(float(data.get("radius", 1.0)))
    if kind == "cube":
        return Cube(int(data.get("d", 2)))
    if kind == "cantor":
        return SelfSimilar1D(IFSSpec.cantor(), int(data.get("depth", DEFAULT_IFS_DEPTH)))
    if kind == "self_similar":
        return SelfSimilar1D(IFSSpec.from_dict(data), int(data.get("depth", DEFAULT_IFS_DEPTH)))
    raise UnknownSetKindError(f"unknown set kind {kind!r}")
