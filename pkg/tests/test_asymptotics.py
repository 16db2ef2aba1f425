import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bestpack.asymptotics import (
    DELTA,
    AsymptoticsTable,
    C_inf,
    csd_root_limit,
    energy_sweep,
    packing_sweep,
    richardson,
    root_limit_fixed_N,
    zeta,
)
from bestpack.energy import OptimizerOptions
from bestpack.geometry import Circle, Cube, IFSSpec, Interval, SelfSimilar1D, Sphere2
from bestpack.packing import PackingOptions


def test_zeta_examples():
    assert zeta(2) == pytest.approx(math.pi**2 / 6, abs=1e-14)
    assert zeta(4) == pytest.approx(math.pi**4 / 90, abs=1e-14)
    assert abs(zeta(50) - (1 + 2.0**-50)) < 1e-15


@given(st.floats(1.05, 120))
def test_zeta_against_mpmath(s):
    assert abs(zeta(s) - float(mpmath.zeta(s))) < 1e-12


def test_zeta_domain():
    with pytest.raises(ValueError):
        zeta(1.0)


def test_constants():
    assert C_inf(1) == pytest.approx(1.0, abs=1e-15)
    assert C_inf(2) == pytest.approx(2 * 12**-0.25, rel=1e-14)
    assert C_inf(3) == pytest.approx(2 ** (1 / 6), rel=1e-14)
    assert DELTA[3] == pytest.approx(math.pi / math.sqrt(18))


def test_circle_energy_normalization():
    N, s = 16, 3
    closed = N * sum((2 * math.sin(math.pi * k / N)) ** -s for k in range(1, N))
    table = energy_sweep(Circle(), s, [N], OptimizerOptions(restarts=2))
    assert table.rows[0].raw == pytest.approx(closed, rel=1e-9)
    assert table.rows[0].normalized == pytest.approx(closed / N**4, rel=1e-9)
    assert table.rows[0].theory == pytest.approx(2 * zeta(3) / (2 * math.pi) ** 3, rel=1e-14)


def test_energy_sweep_precondition():
    with pytest.raises(ValueError):
        energy_sweep(Interval(), 0.5, [4, 8])
    with pytest.raises(ValueError):
        energy_sweep(Interval(), 2, [8, 4])


def test_interval_energy_sweep_short():
    table = energy_sweep(Interval(), 2, [8, 16, 32], OptimizerOptions(restarts=2))
    vals = [r.normalized for r in table.rows]
    assert all(b > a for a, b in zip(vals, vals[1:]))  # rising toward pi^2/3
    assert all(r.rel_gap is not None for r in table.rows)
    assert richardson(table) > vals[-1]


@pytest.mark.parametrize("aset", [Interval(), Circle()], ids=lambda a: a.kind)
def test_packing_sweep_closed_forms(aset):
    table = packing_sweep(aset, [8, 16, 32], PackingOptions(restarts=4))
    for r in table.rows:
        N = r.N
        closed = N / (N - 1) if aset.kind == "interval" else 2 * N * math.sin(math.pi / N)
        assert r.normalized == pytest.approx(closed, abs=1e-9 * N)


def test_packing_theory_values():
    assert packing_sweep(Cube(2), [2], PackingOptions(restarts=1)).rows[0].theory == pytest.approx(1.074569931823542)
    assert packing_sweep(Sphere2(), [2], PackingOptions(restarts=1)).rows[0].theory == pytest.approx(
        math.sqrt(8 * math.pi / math.sqrt(3)))


def test_cantor_packing_sweep_exact():
    table = packing_sweep(SelfSimilar1D(), [5, 10, 20])
    assert [r.raw for r in table.rows] == pytest.approx([1 / 9, 1 / 27, 1 / 81], rel=1e-15)
    assert table.rows[0].theory is None and table.rows[0].rel_gap is None


def test_table_csv_and_plot():
    t = AsymptoticsTable(Interval(), "packing", None, 1)
    t.add(4, 1 / 3, 1.0)
    lines = t.to_csv().splitlines()
    assert lines[0] == "set,mode,s,d,N,raw,normalized,theory,rel_gap"
    assert lines[1].startswith("interval,packing,,1,4,0.33333333333333331,")
    assert t.plot_data_csv().splitlines()[0] == "x,y,theory"


def test_root_limit_interval_three_points():
    seq = dict(root_limit_fixed_N(Interval(), 3, [8, 16, 64], OptimizerOptions(restarts=2), PackingOptions(restarts=2)))
    assert seq[64.0] == pytest.approx((4 * 2.0**64 + 2) ** (1 / 64) / 2, rel=1e-9)


def test_root_limit_circle_two_points():
    seq = root_limit_fixed_N(Circle(), 2, [4, 8, 16, 32], OptimizerOptions(restarts=2), PackingOptions(restarts=2))
    for s, v in seq:
        assert v == pytest.approx(2 ** (1 / s), rel=1e-9)
    assert all(b[1] < a[1] for a, b in zip(seq, seq[1:]))


def test_root_limit_precondition():
    with pytest.raises(ValueError):
        root_limit_fixed_N(Circle(), 3, [1.5, 4])


def test_csd_root_limit():
    seq = dict(csd_root_limit([2, 10, 40, 100]))
    assert seq[10.0] == pytest.approx(float(2 * mpmath.zeta(10)) ** 0.1, rel=1e-13)
    assert seq[10.0] == pytest.approx(1.07188, abs=1e-5)
    assert seq[40.0] == pytest.approx(2 ** (1 / 40), abs=1e-6)
    vals = [v for _, v in csd_root_limit(range(2, 200))]
    assert all(b < a for a, b in zip(vals, vals[1:]))
