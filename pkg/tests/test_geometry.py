import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bestpack.geometry import (
    Circle,
    Cube,
    DimensionError,
    IFSSpec,
    Interval,
    SelfSimilar1D,
    Sphere2,
    distance_to_set,
    ifs_cell_endpoints,
    ifs_evaluate,
    project,
    sample,
    set_from_dict,
)

CANTOR = IFSSpec.cantor()
CATALOG = [Interval(), Interval(-1.0, 2.5), Circle(), Circle(2.0), Sphere2(), Sphere2(0.5), Cube(2), Cube(3),
           SelfSimilar1D(CANTOR)]

coord = st.floats(-3, 3, allow_nan=False)


def _cantor_points(depth):
    """All depth-``depth`` cell endpoints, built by removing middle thirds."""
    cells = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        cells = [c for a, b in cells for c in ((a, a + (b - a) / 3), (b - (b - a) / 3, b))]
    return sorted({x for cell in cells for x in cell})


def test_sphere_projection():
    assert np.allclose(project(Sphere2(), [0, 0, 2]), [0, 0, 1])


def test_interval_clamp():
    assert project(Interval(), 1.7)[0] == 1.0


def test_cantor_projection_ties_go_low():
    # 0.5 sits midway between 1/3 and 2/3, both in the set
    assert project(SelfSimilar1D(CANTOR, 2), 0.5)[0] == pytest.approx(1 / 3, abs=1e-15)
    assert distance_to_set(SelfSimilar1D(CANTOR), 0.5) == pytest.approx(1 / 6, abs=1e-12)


def test_cantor_projection_matches_brute_force():
    # depth-6 truncation: union of the 64 closed cells
    pts = np.array([float(p) for p in _cantor_points(6)])
    lo, hi = pts[0::2], pts[1::2]
    aset = SelfSimilar1D(CANTOR, 6)
    for x in np.linspace(-0.2, 1.2, 301):
        d = np.maximum(np.maximum(lo - x, x - hi), 0.0)
        assert distance_to_set(aset, x) == pytest.approx(d.min(), abs=1e-12)


def test_distance_examples():
    assert distance_to_set(Circle(), [2, 0]) == pytest.approx(1.0)
    assert distance_to_set(Cube(2), [0.5, 0.5]) == 0.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        project(Sphere2(), [1.0, 0.0])
    with pytest.raises(DimensionError):
        distance_to_set(Circle(), [1.0, 0.0, 0.0])


def test_ifs_evaluate_examples():
    assert ifs_evaluate(CANTOR, (1, 0)) == Fraction(2, 3)
    assert ifs_evaluate(CANTOR, (0, 1)) == Fraction(2, 9)
    assert ifs_evaluate(CANTOR, ()) == 0
    with pytest.raises(ValueError):
        ifs_evaluate(CANTOR, (2,))


def test_ifs_validation():
    with pytest.raises(ValueError):
        IFSSpec(2, Fraction(1, 2), (0, Fraction(1, 2)))  # touching cells
    with pytest.raises(ValueError):
        IFSSpec(1, Fraction(1, 3), (0,))
    assert IFSSpec.cantor().lam == pytest.approx(math.log(2) / math.log(3))
    assert IFSSpec.cantor().gap == Fraction(1, 3)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_ifs_addresses_enumerate_endpoints(m):
    from itertools import product

    lefts = {ifs_evaluate(CANTOR, a) for a in product(range(2), repeat=m)}
    assert len(lefts) == 2**m
    assert sorted(lefts) == _cantor_points(m)[::2]


@given(st.lists(st.integers(0, 1), min_size=1, max_size=8), st.lists(st.integers(0, 1), min_size=1, max_size=8))
def test_ifs_contraction(a, b):
    j = 0
    while j < min(len(a), len(b)) and a[j] == b[j]:
        j += 1
    assert abs(ifs_evaluate(CANTOR, a) - ifs_evaluate(CANTOR, b)) <= CANTOR.sigma**j


def test_first_level_gap():
    pts = ifs_cell_endpoints(CANTOR, 5)
    left, right = pts[pts < 0.5], pts[pts > 0.5]
    assert right.min() - left.max() >= float(CANTOR.gap) - 1e-15


@pytest.mark.parametrize("aset", CATALOG, ids=lambda a: a.kind)
@given(x=st.lists(coord, min_size=3, max_size=3))
def test_project_idempotent_and_on_set(aset, x):
    y = project(aset, x[: aset.ambient_dim])
    assert np.allclose(project(aset, y), y, atol=1e-12)
    tol = aset.truncation_error if isinstance(aset, SelfSimilar1D) else 1e-12
    assert distance_to_set(aset, y) <= tol


@pytest.mark.parametrize("aset", CATALOG, ids=lambda a: a.kind)
def test_sample_on_set_and_reproducible(aset):
    a = sample(aset, 11, 200)
    b = sample(aset, 11, 200)
    assert a.shape == (200, aset.ambient_dim)
    assert np.array_equal(a, b)
    tol = aset.truncation_error if isinstance(aset, SelfSimilar1D) else 1e-12
    assert np.all(aset.distance(a) <= tol)


def test_sphere_sample_mean_and_hemisphere():
    X = sample(Sphere2(), 3, 10_000)
    assert np.all(np.abs(X.mean(axis=0)) < 0.05)
    frac = np.mean(X @ np.array([0.3, -0.4, np.sqrt(0.75)]) >= 0)
    assert abs(frac - 0.5) <= 3 * 0.5 / np.sqrt(10_000)


@pytest.mark.parametrize("aset", CATALOG, ids=lambda a: a.kind)
def test_set_roundtrip(aset):
    assert set_from_dict(aset.to_dict()) == aset
