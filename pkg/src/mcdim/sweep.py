"""Dimension samples over a list of parameters and the fit of the |p|**2 coefficient."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

from .bowen import fit_quadratic_coefficient, solve_bowen_extrapolated
from .errors import ConfigError
from .mapcore import McMullenMap
from .raster import Window, box_count, render
from .series import predict_dimension


@dataclass(frozen=True)
class SweepRow:
    p_re: float
    p_im: float
    Q: int
    n_max: int
    D_bowen: float
    D_predicted: float
    D_boxcount: float | None
    fit_residual: float
    boxcount_residual: float | None = None

    def __post_init__(self):
        for name in ("D_bowen", "D_predicted", "D_boxcount"):
            v = getattr(self, name)
            if v is not None and not 0.5 <= v <= 2.0:
                raise ConfigError(f"{name} = {v} outside [0.5, 2]")

    @property
    def p(self) -> complex:
        return complex(self.p_re, self.p_im)


@dataclass(frozen=True)
class SweepFit:
    a: float
    a_quartic: float
    b_quartic: float
    rms: float
    rms_quartic: float
    target: float


def sweep(Q: int, ps: Sequence[complex], n_min: int, n_max: int, tol: float = 1e-13,
          boxcount_res: int | None = None, window: Window | None = None,
          workers: int | None = None) -> list[SweepRow]:
    rows = []
    for p in ps:
        fmap = McMullenMap(Q, complex(p))
        est = solve_bowen_extrapolated(fmap, n_min, n_max, tol, workers=workers)
        D_box = box_res = None
        if boxcount_res:
            win = window or Window.figure(boxcount_res)
            box = box_count(render(fmap, win, workers=workers).boundary_mask, win)
            D_box, box_res = box.D, box.residual
        rows.append(SweepRow(fmap.p.real, fmap.p.imag, Q, n_max, est.D,
                             predict_dimension(Q, fmap.p).D, D_box, est.residual, box_res))
    return rows


def fit_rows(rows: Sequence[SweepRow]) -> SweepFit:
    """Quadratic fit ``D - 1 = a |p|**2``, and the same with a ``|p|**4``
    nuisance term when at least two distinct |p| are present."""
    if not rows:
        raise ConfigError("no sweep rows to fit")
    ps = [r.p for r in rows]
    Ds = [r.D_bowen for r in rows]
    a, _, rms = fit_quadratic_coefficient(ps, Ds)
    if len({abs(p) for p in ps}) >= 2:
        aq, bq, rmsq = fit_quadratic_coefficient(ps, Ds, quartic=True)
    else:
        aq, bq, rmsq = a, 0.0, rms
    return SweepFit(a, aq, bq, rms, rmsq, 1.0 / math.log(rows[0].Q))


def _cell(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_rows(fh, rows: Sequence[SweepRow]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    names = [f.name for f in fields(SweepRow)]
    writer.writerow(names)
    for r in rows:
        d = asdict(r)
        writer.writerow([_cell(d[k]) for k in names])


def read_rows(fh) -> list[SweepRow]:
    out = []
    for rec in csv.DictReader(fh):
        opt = lambda k: float(rec[k]) if rec[k] else None
        out.append(SweepRow(float(rec["p_re"]), float(rec["p_im"]), int(rec["Q"]),
                            int(rec["n_max"]), float(rec["D_bowen"]), float(rec["D_predicted"]),
                            opt("D_boxcount"), float(rec["fit_residual"]), opt("boxcount_residual")))
    return out
