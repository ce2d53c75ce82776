from __future__ import annotations

import cmath
import csv
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import cKDTree

from mcdim.errors import ConfigError, ConvergenceError, RegimeError
from mcdim.mapcore import TAU, McMullenMap
from mcdim.periodic import (
    CSV_COLUMNS, BoundaryAngle, default_workers, enumerate_points,
    locate, motion_lipschitz,
)
from mcdim.series import TruncatedSeries, boundary_series

EPS = np.finfo(float).eps


def test_angle_basics():
    a = BoundaryAngle(5, 2, 3)
    assert a.denominator == 8
    assert a.t == Fraction(5, 8)
    assert a.image() == BoundaryAngle(7, 2, 3)
    assert a.orbit_indices() == [5, 7]
    with pytest.raises(ConfigError):
        BoundaryAngle(8, 2, 3)
    with pytest.raises(ConfigError):
        BoundaryAngle(0, 0, 3)


def test_locate_examples_at_p0():
    f = McMullenMap(3, 0)
    pt = locate(f, BoundaryAngle(0, 1, 3))
    assert pt.z == pytest.approx(1, abs=1e-15)
    assert pt.multiplier == pytest.approx(3, rel=1e-14)
    pt = locate(f, BoundaryAngle(1, 2, 3))
    assert pt.z == pytest.approx(cmath.exp(1j * TAU / 8), abs=1e-14)
    assert abs(pt.multiplier) == pytest.approx(9, rel=1e-13)


def test_locate_real_fixed_point():
    # the outer positive root of x**6 - x**4 + p = 0 (about 0.97153, inside the unit circle)
    p = 0.05
    roots = np.roots([1, 0, -1, 0, 0, 0, p])
    outer = max(r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0)
    pt = locate(McMullenMap(3, p), BoundaryAngle(0, 1, 3))
    assert abs(pt.z.imag) < 1e-15
    assert pt.z.real == pytest.approx(outer, abs=1e-12)
    assert pt.z.real < 1
    assert abs(McMullenMap(3, p)(pt.z) - pt.z) < 1e-12
    assert abs(pt.multiplier) > 1


def test_locate_errors():
    f = McMullenMap(3, 0.05)
    with pytest.raises(RegimeError):
        locate(McMullenMap(3, 0.2), BoundaryAngle(0, 1, 3))
    with pytest.raises(ConfigError):
        locate(f, BoundaryAngle(0, 1, 4))
    with pytest.raises(ConfigError):
        locate(f, BoundaryAngle(0, 1, 3), tol=0)
    with pytest.raises(ConvergenceError):
        locate(f, BoundaryAngle(1, 4, 3), max_iter=1)


def test_enumerate_examples_at_p0():
    pts = enumerate_points(McMullenMap(3, 0), 2)
    np.testing.assert_allclose(pts.z, np.exp(1j * TAU * np.arange(8) / 8), atol=1e-14)
    pts = enumerate_points(McMullenMap(4, 0), 1)
    np.testing.assert_allclose(pts.z, np.exp(1j * TAU * np.arange(3) / 3), atol=1e-14)


@pytest.mark.parametrize("Q,n", [(3, 6), (4, 5), (5, 4), (7, 3)])
def test_p0_exactness(Q, n):
    pts = enumerate_points(McMullenMap(Q, 0), n)
    N = Q**n - 1
    assert len(pts) == N
    np.testing.assert_allclose(pts.z, np.exp(1j * TAU * np.arange(N) / N), rtol=0, atol=1e-12)
    np.testing.assert_allclose(np.abs(pts.multiplier), float(Q) ** n, rtol=1e-10)
    assert pts.radial_constant == 0.0


def test_enumerate_q3_p005_n6():
    f = McMullenMap(3, 0.05)
    pts = enumerate_points(f, 6)
    assert len(pts) == 728
    assert np.all(np.abs(np.abs(pts.z) - 1) < 0.1)
    assert np.all(np.abs(pts.multiplier) > 1)
    assert np.all(pts.log_abs_multiplier > 0)
    assert np.max(pts.residual) <= 1e-10
    assert pts.forward_closure_error() <= 1e-8
    assert pts.radial_constant * 0.05 == pytest.approx(np.max(np.abs(np.abs(pts.z) - 1)))


@pytest.mark.parametrize("Q,p,n", [(3, 0.05j, 8), (3, 0.1, 7), (4, 0.03 - 0.01j, 6),
                                   (5, 0.02 + 0.02j, 5), (7, 0.04, 3)])
def test_forward_closure_and_residual(Q, p, n):
    pts = enumerate_points(McMullenMap(Q, p), n)
    assert len(pts) == Q**n - 1
    assert pts.forward_closure_error() <= 1e-8
    assert np.max(pts.residual) <= 1e-10
    # backward error: the residual is rounding in f^n, amplified by the multiplier
    assert np.max(pts.residual / np.abs(pts.multiplier)) <= 1e-14


def test_residual_at_large_n_is_rounding_limited():
    pts = enumerate_points(McMullenMap(3, 0.05), 11)
    assert np.max(pts.residual) <= 64 * EPS * 3.0**11
    assert np.max(pts.residual / np.abs(pts.multiplier)) <= 1e-14


@pytest.mark.parametrize("Q,p,n", [(3, 0.05, 4), (4, 0.02 + 0.03j, 3), (5, 0.04j, 2)])
def test_locate_agrees_with_enumerate(Q, p, n):
    f = McMullenMap(Q, p)
    pts = enumerate_points(f, n)
    for j in range(0, Q**n - 1, max(1, (Q**n - 1) // 9)):
        one = locate(f, BoundaryAngle(j, n, Q))
        assert abs(one.z - pts.z[j]) < 1e-12
        assert one.log_abs_multiplier == pytest.approx(pts.log_abs_multiplier[j], rel=1e-12)
        assert abs(one.multiplier - pts.multiplier[j]) <= 1e-10 * abs(one.multiplier)


def test_indexing_and_iteration():
    pts = enumerate_points(McMullenMap(3, 0.02), 3)
    rec = pts[5]
    assert rec.angle == BoundaryAngle(5, 3, 3)
    assert rec.z == pts.z[5]
    assert pts[-1].angle.j == len(pts) - 1
    assert [r.angle.j for r in pts] == list(range(26))


@pytest.mark.parametrize("Q,p,n", [(3, 0.05, 5), (3, 0.1j, 6), (4, 0.05, 4), (5, 0.08, 3)])
def test_closest_pair_is_consecutive(Q, p, n):
    # the duplicate check only compares neighbours along the curve; brute force agrees
    z = enumerate_points(McMullenMap(Q, p), n).z
    xy = np.column_stack([z.real, z.imag])
    d, _ = cKDTree(xy).query(xy, k=2)
    gaps = np.abs(np.diff(np.concatenate([z, z[:1]])))
    assert d[:, 1].min() == pytest.approx(gaps.min(), rel=1e-12)
    assert d[:, 1].min() > 1e-3


def test_workers_do_not_change_result(monkeypatch):
    f = McMullenMap(3, 0.04 - 0.01j)
    a = enumerate_points(f, 7, workers=1)
    b = enumerate_points(f, 7, workers=5)
    assert np.array_equal(a.z, b.z)
    assert np.array_equal(a.log_abs_multiplier, b.log_abs_multiplier)
    monkeypatch.setenv("MCDIM_WORKERS", "3")
    assert default_workers() == 3
    c = enumerate_points(f, 7)
    assert np.array_equal(a.z, c.z)
    monkeypatch.setenv("MCDIM_WORKERS", "zero")
    with pytest.raises(ConfigError):
        default_workers()


def test_enumerate_errors():
    with pytest.raises(ConfigError):
        enumerate_points(McMullenMap(3, 0.01), 15)
    with pytest.raises(ConfigError):
        enumerate_points(McMullenMap(3, 0.01), 0)
    with pytest.raises(RegimeError):
        enumerate_points(McMullenMap(3, 0.11), 3)
    with pytest.raises(ConvergenceError):
        enumerate_points(McMullenMap(3, 0.05), 4, max_iter=3)


def test_motion_continuity():
    C = motion_lipschitz(3, 0.02, 0.021, 6)
    assert 0 < C < 2
    C2 = motion_lipschitz(3, 0.05, 0.049 + 0.0005j, 6)
    assert 0 < C2 < 2
    with pytest.raises(ConfigError):
        motion_lipschitz(3, 0.02, 0.02, 4)


def test_series_cross_check_cubic_error():
    trunc = TruncatedSeries(40, 40)
    consts = []
    for p in (0.02, 0.01):
        f = McMullenMap(3, p)
        pts = enumerate_points(f, 5)
        t = np.arange(len(pts)) / len(pts)
        err = np.max(np.abs(pts.z - boundary_series(t, f, trunc)))
        consts.append(err / p**3)
    assert consts[0] < 10 and consts[1] < 10
    assert 0.5 < consts[0] / consts[1] < 2


def test_csv_dump(tmp_path):
    pts = enumerate_points(McMullenMap(3, 0.03 + 0.01j), 3)
    path = tmp_path / "points.csv"
    pts.to_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 27
    rec = dict(zip(rows[0], rows[10]))
    assert int(rec["j"]) == 9 and int(rec["n"]) == 3
    assert Fraction(int(rec["t_num"]), int(rec["t_den"])) == Fraction(9, 26)
    # round-trip decimal serialization
    assert complex(float(rec["z_re"]), float(rec["z_im"])) == pts.z[9]
    assert float(rec["log_abs_mult"]) == pts.log_abs_multiplier[9]
    assert math.isclose(float(rec["residual"]), pts.residual[9])
