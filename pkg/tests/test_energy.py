import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from bestpack.energy import (
    Configuration,
    InfiniteEnergyError,
    OptimizerOptions,
    energy_upper_constant,
    minimize_energy,
    riesz_energy,
    riesz_gradient,
)
from bestpack.geometry import Circle, Cube, IFSSpec, Interval, SelfSimilar1D, Sphere2


def energy_oracle(X, s):
    X = np.atleast_2d(np.asarray(X, float))
    total = 0.0
    for i in range(len(X)):
        for j in range(len(X)):
            if i != j:
                total += math.dist(X[i], X[j]) ** -s
    return total


def circle_equal_energy(N, s, R=1.0):
    return N * sum((2 * R * math.sin(math.pi * k / N)) ** -s for k in range(1, N))


def test_energy_examples():
    assert riesz_energy([[0.0], [1.0]], 2) == 2.0
    tri = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]
    assert riesz_energy(tri, 1) == pytest.approx(6.0, rel=1e-14)
    assert riesz_energy(np.linspace(0, 1, 4)[:, None], 2) == pytest.approx(65.0, rel=1e-14)


def test_coincident_points_named():
    with pytest.raises(InfiniteEnergyError) as err:
        riesz_energy([[0.0], [0.5], [0.5]], 2)
    assert err.value.pair == (1, 2)


def test_gradient_examples():
    G = riesz_gradient([[0.0], [1.0]], 2)
    assert np.allclose(G[:, 0], [4.0, -4.0])
    G = riesz_gradient([[0.0, 0.0], [-1.0, 0.3], [1.0, -0.3]], 3)
    assert np.allclose(G[0], 0.0, atol=1e-14)


def _fd_gradient(X, s, h=1e-6):
    G = np.zeros_like(X)
    for i in range(X.shape[0]):
        for k in range(X.shape[1]):
            P, M = X.copy(), X.copy()
            P[i, k] += h
            M[i, k] -= h
            G[i, k] = (riesz_energy(P, s) - riesz_energy(M, s)) / (2 * h)
    return G


@pytest.mark.parametrize("aset", [Interval(), Circle(), Sphere2(), Cube(2), SelfSimilar1D()], ids=lambda a: a.kind)
@pytest.mark.parametrize("s", [1.0, 3.0])
def test_gradient_matches_finite_differences(aset, s):
    rng = np.random.default_rng(5)
    X = aset.sample(rng, 5)
    G = riesz_gradient(X, s)
    F = _fd_gradient(X, s)
    assert np.linalg.norm(G - F) <= 1e-6 * np.linalg.norm(G)


points3 = st.lists(st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3), min_size=2, max_size=7)


@given(points3, st.floats(0.5, 6), st.integers(0, 10_000))
def test_energy_matches_oracle_and_isometry(P, s, seed):
    X = np.array(P)
    if min(math.dist(a, b) for i, a in enumerate(X) for b in X[i + 1:]) < 1e-2:
        return
    e = riesz_energy(X, s)
    assert e == pytest.approx(energy_oracle(X, s), rel=1e-12)
    rot = Rotation.random(random_state=seed).as_matrix()
    Y = X @ rot.T + np.array([0.3, -1.1, 2.0])
    assert abs(riesz_energy(Y, s) - e) <= 1e-12 * e
    assert riesz_energy(X[::-1], s) == pytest.approx(e, rel=1e-14)


@given(points3, st.floats(0.5, 6), st.floats(0.1, 10))
def test_energy_scaling(P, s, c):
    X = np.array(P)
    if min(math.dist(a, b) for i, a in enumerate(X) for b in X[i + 1:]) < 1e-2:
        return
    assert riesz_energy(c * X, s) == pytest.approx(c**-s * riesz_energy(X, s), rel=1e-12)


def test_minimize_circle_square():
    rep = minimize_energy(Circle(), 4, 2, OptimizerOptions(restarts=4))
    assert rep.energy == pytest.approx(5.0, rel=1e-9)
    assert rep.energy == pytest.approx(riesz_energy(rep.config, 2), rel=1e-10)


def test_minimize_interval_two_points():
    rep = minimize_energy(Interval(), 2, 3, OptimizerOptions(restarts=2))
    assert rep.energy == pytest.approx(2.0, rel=1e-12)
    assert sorted(rep.config.points[:, 0]) == pytest.approx([0.0, 1.0], abs=1e-12)


def test_minimize_circle_pentagon():
    rep = minimize_energy(Circle(), 5, 1, OptimizerOptions(restarts=4))
    best = circle_equal_energy(5, 1)
    # brute force over one free angle offset confirms equal spacing is optimal
    grid = [np.sort(np.r_[0, 2 * math.pi * np.arange(1, 4) / 5, 2 * math.pi * 4 / 5 + t]) for t in np.linspace(-0.3, 0.3, 61)]
    others = [energy_oracle(np.c_[np.cos(a), np.sin(a)], 1) for a in grid]
    assert min(others) >= best - 1e-9
    assert rep.energy == pytest.approx(best, rel=1e-6)


def test_report_beats_initial_samples_and_is_deterministic():
    opts = OptimizerOptions(restarts=3, seed=4)
    a = minimize_energy(Sphere2(), 7, 1, opts)
    b = minimize_energy(Sphere2(), 7, 1, opts)
    assert np.array_equal(a.config.points, b.config.points)
    rng = np.random.default_rng(4)
    for _ in range(3):
        assert a.energy <= riesz_energy(Sphere2().sample(rng, 7), 1)
    assert a.to_dict()["N"] == 7


def test_energy_monotone_in_N_on_interval():
    values = [minimize_energy(Interval(), N, 2, OptimizerOptions(restarts=2)).energy for N in range(2, 13)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_discrete_energy_on_cantor_matches_exhaustive_search():
    from itertools import combinations

    aset = SelfSimilar1D(IFSSpec.cantor())
    opts = OptimizerOptions(restarts=4, candidate_depth=5)
    rep = minimize_energy(aset, 3, 2, opts)
    cands = aset.candidates(5)
    best = min(energy_oracle(np.array(c)[:, None], 2) for c in combinations(cands, 3))
    assert rep.energy == pytest.approx(best, rel=1e-12)


def test_configuration_roundtrip_and_validate():
    c = Configuration(Circle(), [[1.0, 0.0], [0.0, 1.0]])
    c.validate()
    d = Configuration.from_dict(c.to_dict())
    assert np.array_equal(c.points, d.points)
    with pytest.raises(ValueError):
        Configuration(Circle(), [[2.0, 0.0], [0.0, 1.0]]).validate()


def test_energy_upper_constant():
    # d' = 1: 4 * zeta(s)
    from mpmath import zeta

    assert energy_upper_constant(3, 1) == pytest.approx(4 * float(zeta(3)), rel=1e-9)
    with pytest.raises(ValueError):
        energy_upper_constant(2, 2)
