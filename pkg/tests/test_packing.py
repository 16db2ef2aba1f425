import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bestpack.geometry import Circle, Cube, Interval, Sphere2
from bestpack.packing import (
    PackingOptions,
    PreconditionError,
    best_packing,
    certify_packing_upper_bound,
    greedy_lower_bound,
    maximin_polish,
    min_pairwise_distance,
)

FAST = PackingOptions(restarts=4)


def pairwise_oracle(X):
    X = np.atleast_2d(X)
    return min(math.dist(a, b) for i, a in enumerate(X) for b in X[i + 1:])


def test_min_distance_examples():
    assert min_pairwise_distance([[0.0], [0.5], [1.0]]) == 0.5
    assert min_pairwise_distance([[1, 0], [0, 1], [-1, 0], [0, -1]]) == pytest.approx(math.sqrt(2))
    assert min_pairwise_distance([[0, 0, 1], [0, 0, -1]]) == 2.0


coord = st.integers(-5000, 5000).map(lambda v: v / 1000)


@given(st.lists(st.lists(coord, min_size=2, max_size=2), min_size=2, max_size=12))
def test_min_distance_matches_oracle(P):
    assert min_pairwise_distance(P) == pytest.approx(pairwise_oracle(np.array(P)), rel=1e-12)


@pytest.mark.parametrize("N", [2, 3, 5, 8, 13, 21, 32])
def test_interval_exact(N):
    rep = best_packing(Interval(), N, FAST)
    assert rep.delta <= 1 / (N - 1) + 1e-12
    assert rep.delta == pytest.approx(1 / (N - 1), abs=1e-6)
    assert rep.delta == min_pairwise_distance(rep.config)


@pytest.mark.parametrize("N", [3, 7, 12, 20, 32])
def test_circle_exact(N):
    rep = best_packing(Circle(), N, FAST)
    assert rep.delta <= 2 * math.sin(math.pi / N) + 1e-12
    assert rep.delta == pytest.approx(2 * math.sin(math.pi / N), abs=1e-6)


@pytest.mark.parametrize("N,target", [(4, math.sqrt(8 / 3)), (6, math.sqrt(2))])
def test_sphere_polyhedra(N, target):
    assert best_packing(Sphere2(), N, FAST).delta == pytest.approx(target, abs=1e-6)


def test_monotone_in_N():
    deltas = [best_packing(Circle(), N, FAST).delta for N in range(2, 14)]
    assert all(b <= a + 1e-12 for a, b in zip(deltas, deltas[1:]))


def test_polish_never_decreases_separation():
    rng = np.random.default_rng(1)
    X = Sphere2().sample(rng, 10)
    Y, moves = maximin_polish(Sphere2(), X)
    assert min_pairwise_distance(Y) >= min_pairwise_distance(X)
    assert moves > 0
    assert np.allclose(np.linalg.norm(Y, axis=1), 1.0)


def test_report_dict():
    d = best_packing(Interval(), 3, FAST).to_dict()
    assert d["lower_bound_certified"] is True and d["method"] in ("schedule", "polish")


def test_certificate_interval():
    N0 = certify_packing_upper_bound(Interval(), 0.1, 1.3, 1)
    assert N0 == 7
    assert best_packing(Interval(), N0, FAST).delta <= 0.2


def test_certificate_circle():
    N0 = certify_packing_upper_bound(Circle(), 0.05, 13, 1)
    assert N0 == 83
    assert 2 * math.sin(math.pi / N0) <= 0.1
    with pytest.raises(PreconditionError):
        certify_packing_upper_bound(Circle(), 0.05, 0.7, 1)


@pytest.mark.parametrize("N", [4, 9, 16])
def test_certificates_never_contradicted(N):
    for aset, rho, gamma in ((Interval(), 0.1, 1.3), (Circle(), 0.2, 13)):
        N0 = certify_packing_upper_bound(aset, rho, gamma, 1)
        if N >= N0:
            assert best_packing(aset, N, FAST).delta <= 2 * rho


def test_greedy_examples():
    k, cfg = greedy_lower_bound(Interval(), 0.34)
    assert k >= 3 and min_pairwise_distance(cfg) >= 0.34
    assert greedy_lower_bound(Sphere2(), 1.9)[0] == 2
    assert greedy_lower_bound(Cube(2), 1.5)[0] == 1
