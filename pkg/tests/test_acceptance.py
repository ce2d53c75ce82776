"""End-to-end acceptance checks.

Each test prints one ``CRITERION k PASS|FAIL ...`` line (shown even under
output capture) and then asserts the same condition.
"""

from __future__ import annotations

import cmath
import math
import time

import numpy as np
import pytest

from mcdim.bowen import fit_quadratic_coefficient, solve_bowen, solve_bowen_extrapolated
from mcdim.identities import run_checks
from mcdim.mapcore import McMullenMap
from mcdim.periodic import enumerate_points
from mcdim.raster import Window, box_count, render
from mcdim.series import TruncatedSeries, boundary_series, sum_AmAk


@pytest.fixture
def report(capsys):
    def emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {k} {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def _sweep_fit(Q, ps, n_min, n_max):
    Ds = [solve_bowen_extrapolated(McMullenMap(Q, p), n_min, n_max).D for p in ps]
    plain, _, _ = fit_quadratic_coefficient(ps, Ds)
    quartic, b, _ = fit_quadratic_coefficient(ps, Ds, quartic=True)
    return plain, quartic, b


def test_criterion_1_closed_form_at_p0(report):
    start = time.perf_counter()
    worst = 0.0
    for Q in (3, 4, 5, 7):
        for n in range(3, 9):
            D = solve_bowen(McMullenMap(Q, 0), n).D
            worst = max(worst, abs(D - math.log(Q**n - 1) / (n * math.log(Q))))
    D_inf = solve_bowen_extrapolated(McMullenMap(3, 0), 4, 10).D
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and abs(D_inf - 1) < 1e-4 and elapsed < 10
    report(1, ok, f"max_err={worst:.2e} D_inf-1={D_inf - 1:.2e} time={elapsed:.1f}s")
    assert ok


def test_criterion_2_coefficient_recovery_q3(report):
    target = 1 / math.log(3)
    real = [0.02, 0.03, 0.04, 0.05]
    imag = [1j * p for p in real]
    plain_r, a_r, b_r = _sweep_fit(3, real, 6, 12)
    plain_i, a_i, b_i = _sweep_fit(3, imag, 6, 12)
    ok = (abs(a_r - target) <= 0.1 * target and abs(a_i - target) <= 0.1 * target
          and abs(a_i - a_r) <= 0.05 * abs(a_r))
    report(2, ok, f"a11_real={a_r:.6f} a11_imag={a_i:.6f} target={target:.6f} "
                  f"(quadratic-only fit: real={plain_r:.6f} imag={plain_i:.6f}; "
                  f"quartic b real={b_r:.3g} imag={b_i:.3g})")
    assert ok


def test_criterion_3_q_dependence(report):
    ps = [0.02, 0.03, 0.04, 0.05]
    res = {}
    for Q, (lo, hi) in {4: (5, 9), 5: (4, 8)}.items():
        plain, quartic, _ = _sweep_fit(Q, ps, lo, hi)
        res[Q] = (plain, quartic, 1 / math.log(Q))
    ok = all(abs(a - t) <= 0.15 * t for _, a, t in res.values())
    detail = " ".join(f"Q{Q}: a11={a:.6f} target={t:.6f} quadratic-only={pl:.6f}"
                      for Q, (pl, a, t) in res.items())
    report(3, ok, detail)
    assert ok


def test_criterion_4_symmetries(report):
    worst = 0.0
    for Q, p in [(3, 0.02 + 0.02j), (4, 0.03j), (5, 0.02 + 0.01j)]:
        D = solve_bowen(McMullenMap(Q, p), 6).D
        Dc = solve_bowen(McMullenMap(Q, p.conjugate()), 6).D
        Dr = solve_bowen(McMullenMap(Q, cmath.exp(2j * math.pi / (Q - 1)) * p), 6).D
        worst = max(worst, abs(D - Dc), abs(D - Dr))
    ok = worst < 1e-6
    report(4, ok, f"max_gap={worst:.2e}")
    assert ok


def test_criterion_5_sum_AmAk(report):
    ns = (6, 8, 10, 12)
    trunc = TruncatedSeries(30, 30)
    sums = [sum_AmAk(n, 3, trunc) for n in ns]
    per_n = [s / n for s, n in zip(sums, ns)]
    spread = max(abs(s - 4 * n) for s, n in zip(sums, ns))
    ok = all(3.5 <= v <= 4.5 for v in per_n) and 3.8 <= per_n[-1] <= 4.2 and spread <= 10
    report(5, ok, "sum/n=" + ",".join(f"{v:.6f}" for v in per_n) + f" max|sum-4n|={spread:.3g}")
    assert ok


def test_criterion_6_identity_suite(report):
    start = time.perf_counter()
    checks = run_checks(3)
    elapsed = time.perf_counter() - start
    failed = [c.name for c in checks if not c.passed]
    ok = not failed and elapsed < 60
    report(6, ok, f"{len(checks) - len(failed)}/{len(checks)} checks time={elapsed:.1f}s"
                  + (f" failed={','.join(failed)}" if failed else ""))
    assert ok


def test_criterion_7_cross_method(report):
    trunc = TruncatedSeries(40, 40)
    errs = []
    for p in (0.02, 0.01):
        f = McMullenMap(3, p)
        pts = enumerate_points(f, 6)
        t = np.arange(len(pts)) / len(pts)
        errs.append(float(np.max(np.abs(pts.z - boundary_series(t, f, trunc)))))
    ratio = errs[0] / errs[1]

    f = McMullenMap(3, 0.05)
    w = Window.figure(4096)
    D_box = box_count(render(f, w).boundary_mask, w).D
    D_bowen = solve_bowen_extrapolated(f, 6, 12).D
    ok = 6 <= ratio <= 10 and abs(D_box - D_bowen) <= 0.05
    report(7, ok, f"err(0.02)={errs[0]:.3e} err(0.01)={errs[1]:.3e} ratio={ratio:.3f} "
                  f"D_box={D_box:.6f} D_bowen={D_bowen:.6f}")
    assert ok


def test_criterion_8_render_regression(report, tmp_path):
    results = []
    for Q in (3, 4):
        f = McMullenMap(Q, 0.005)
        w = Window.figure(800)
        a = render(f, w, path=tmp_path / f"a{Q}.ppm", workers=1)
        b = render(f, w, path=tmp_path / f"b{Q}.ppm", workers=4)
        same = (tmp_path / f"a{Q}.ppm").read_bytes() == (tmp_path / f"b{Q}.ppm").read_bytes()
        results.append((Q, a.boundary_components(), a.boundary_encloses(0j),
                        all(a.infinity_touches_borders().values()), same))
    ok = all(c == 1 and enc and borders and same for _, c, enc, borders, same in results)
    report(8, ok, " ".join(f"Q{Q}: components={c} encloses_origin={enc} "
                           f"all_borders={bd} deterministic={s}" for Q, c, enc, bd, s in results))
    assert ok
