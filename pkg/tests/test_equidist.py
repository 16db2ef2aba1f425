import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bestpack.energy import Configuration, OptimizerOptions, minimize_energy
from bestpack.equidist import Region, arcs, equidist_deviation, hemispheres, quartiles, region_fraction
from bestpack.geometry import Circle, Cube, Interval, Sphere2

OCTAHEDRON = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1.0]])


def test_examples():
    c = Configuration(Interval(), np.linspace(0, 1, 5)[:, None])
    assert region_fraction(c, Region(Interval(), "subinterval", (0, 0.5))) == 0.6
    assert region_fraction(c, Region(Interval(), "full")) == 1.0
    up = Region(Sphere2(), "spherical_cap", ((0.0, 0.0, 1.0), 0.0))
    assert region_fraction(Configuration(Sphere2(), OCTAHEDRON), up) == pytest.approx(5 / 6)


def test_measure_fractions():
    assert Region(Circle(), "arc", (0.0, math.pi / 2)).measure_fraction == 0.25
    assert Region(Sphere2(), "spherical_cap", ((1.0, 0.0, 0.0), 0.5)).measure_fraction == 0.25
    assert Region(Cube(2), "subcube", ((0, 0), (0.5, 0.25))).measure_fraction == 0.125
    with pytest.raises(ValueError):
        Region(Circle(), "subinterval", (0, 1))


def test_small_N_excluded():
    c = Configuration(Sphere2(), [[1.0, 0, 0], [-1.0, 0, 0]])
    rep = equidist_deviation([c], hemispheres(Sphere2(), (0.0, 0.0, 1.0)))
    assert rep.max_by_N[2] == 0.5 and rep.excluded == [2] and rep.assessed() == {}


@given(st.integers(0, 10_000), st.floats(-1, 1))
def test_complement_consistency_caps(seed, h):
    rng = np.random.default_rng(seed)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    cfg = Configuration(Sphere2(), np.vstack([Sphere2().sample(rng, 20), OCTAHEDRON]))
    B = Region(Sphere2(), "spherical_cap", (tuple(axis), h))
    total = region_fraction(cfg, B) + region_fraction(cfg, B.complement())
    on_boundary = np.count_nonzero(np.abs(cfg.points @ axis - h) <= 1e-12)
    assert total == pytest.approx(1 + on_boundary / cfg.N)


@given(st.floats(-3, 3), st.floats(0, 2 * math.pi))
def test_complement_consistency_arcs(t1, width):
    cfg = Configuration(Circle(), np.c_[np.cos(np.arange(12) * math.pi / 6), np.sin(np.arange(12) * math.pi / 6)])
    B = Region(Circle(), "arc", (t1, t1 + width))
    assert region_fraction(cfg, B) + region_fraction(cfg, B.complement()) >= 1 - 1e-12
    assert B.measure_fraction + B.complement().measure_fraction == pytest.approx(1.0)


def test_interval_energy_quartiles():
    cfgs = [minimize_energy(Interval(), N, 3, OptimizerOptions(restarts=2)).config for N in (32, 64, 128)]
    rep = equidist_deviation(cfgs, quartiles(Interval()))
    assert rep.max_by_N[128] < 0.05
    tail = [rep.max_by_N[N] for N in (32, 64, 128)]
    assert all(b <= a + 0.02 for a, b in zip(tail, tail[1:]))


def test_csv():
    c = Configuration(Circle(), [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    lines = equidist_deviation([c], arcs(Circle())).to_csv().splitlines()
    assert lines[0] == "N,region,fraction,measure_fraction,deviation"
    assert len(lines) == 5
