"""Dimension of the boundary curve from its periodic points.

The dimension D solves ``sum_j |(f^n)'(z_j)|**(-D) ~ 1`` over the period-n
points; at fixed n the root of ``S_n(D) = 1`` differs from the limit by an
O(1/n) term plus corrections decaying like ``Q**-n``, which
:func:`solve_bowen_extrapolated` fits away.  Also here: the Moran-type
equation ``sum_i r_i**s = 1`` that gives IFS dimension bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BracketError, ConfigError, DegenerateFitError, RegimeError
from .mapcore import McMullenMap
from .periodic import PeriodicPointSet, enumerate_points

METHODS = ("bowen_fixed_n", "bowen_extrapolated", "falconer_upper",
           "falconer_lower", "series_prediction", "box_count")

D_LO, D_HI = 0.5, 2.0


@dataclass
class DimensionEstimate:
    """A dimension value with provenance.

    ``n`` is the period used (0 for extrapolated or non-periodic methods);
    ``residual`` is method specific: ``|S_n(D) - 1|`` for the fixed-n solve,
    the RMS fit residual for the extrapolation and box counting.
    """

    D: float
    n: int = 0
    bracket_lo: float = math.nan
    bracket_hi: float = math.nan
    residual: float = 0.0
    method: str = "bowen_fixed_n"
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method tag {self.method!r}")
        if math.isnan(self.bracket_lo):
            self.bracket_lo = self.D
        if math.isnan(self.bracket_hi):
            self.bracket_hi = self.D


@dataclass(frozen=True)
class ContractionRatios:
    """Lower (b_i) and upper (c_i) contraction ratios of an IFS."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(b) for b in self.lower)
        up = tuple(float(c) for c in self.upper)
        if len(lo) != len(up) or len(lo) < 2:
            raise ConfigError("need two equal-length ratio lists with at least 2 maps")
        for b, c in zip(lo, up):
            if not 0.0 < b <= c < 1.0:
                raise ConfigError(f"ratios must satisfy 0 < b <= c < 1, got b={b}, c={c}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def from_points(cls, points: PeriodicPointSet, c_lower: float = 1.0,
                    c_upper: float = 1.0) -> ContractionRatios:
        """Ratios ``C / |(f^n)'(z_j)|`` for distortion constants C."""
        inv = np.exp(-np.asarray(points.log_abs_multiplier))
        return cls(tuple(c_lower * inv), tuple(c_upper * inv))


def _log_multipliers(points) -> np.ndarray:
    if isinstance(points, PeriodicPointSet):
        ell = points.log_abs_multiplier
    elif isinstance(points, np.ndarray):
        ell = points
    else:
        ell = [pt.log_abs_multiplier for pt in points]
    ell = np.asarray(ell, dtype=float)
    if ell.size == 0:
        raise ConfigError("empty point list")
    if np.any(ell <= 0):
        raise RegimeError("all multipliers must satisfy |multiplier| > 1")
    return ell


def pressure_sum(points, D: float) -> float:
    """``S_n(D) = sum_j exp(-D log|(f^n)'(z_j)|)``.

    ``points`` is a :class:`PeriodicPointSet`, a sequence of
    :class:`BoundaryPeriodicPoint`, or an array of log-multipliers.  The sum
    is exactly rounded (``math.fsum``), hence independent of ordering.
    """
    if D <= 0:
        raise ConfigError("D must be positive")
    ell = _log_multipliers(points)
    return math.fsum(np.exp(-D * ell))


def _dpressure(ell: np.ndarray, D: float) -> float:
    return -float(np.sum(ell * np.exp(-D * ell)))


def _solve_moran(log_ratios: np.ndarray, tol: float, lo: float = D_LO, hi: float = D_HI,
                 polish: bool = True) -> tuple[float, float, float, float]:
    """Root of ``sum exp(-s * log_ratios) = 1`` by bisection plus Newton polish.

    Bisection stops at a bracket of 1e-8 when polishing (Newton then converges
    quadratically from there), otherwise at ``tol``.  Returns
    ``(s, lo, hi, |S(s) - 1|)`` with ``[lo, hi]`` the final bracket.

    Bisection only needs the sign of ``S - 1`` well away from the root, so it
    uses numpy's pairwise sum; Newton and the residual use ``math.fsum``.
    """
    f = lambda s: math.fsum(np.exp(-s * log_ratios)) - 1.0
    fast = (lambda s: float(np.sum(np.exp(-s * log_ratios))) - 1.0) if polish else f
    flo, fhi = fast(lo), fast(hi)
    if flo < 0 or fhi > 0:
        raise BracketError(
            f"S(s) - 1 does not change sign on [{lo}, {hi}] ({flo:.3g}, {fhi:.3g})")
    width = max(1e-8, tol) if polish else max(tol, 1e-15)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fm = fast(mid)
        if fm == 0:
            lo = hi = mid
            break
        if fm > 0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    fs = f(s)
    if polish:
        # allow for the pairwise-sum rounding near the bracket ends
        lo, hi = lo - 1e-12, hi + 1e-12
        for _ in range(8):
            step = fs / _dpressure(log_ratios, s)
            if not lo <= s - step <= hi:
                break
            s -= step
            fs = f(s)
            if abs(step) <= 0.25 * tol:
                break
    return s, lo, hi, abs(fs)


def solve_bowen(fmap_or_points, n: int | None = None, tol: float = 1e-13,
                **enum_kw) -> DimensionEstimate:
    """Root of ``S_n(D) = 1`` on [0.5, 2].

    Accepts a :class:`McMullenMap` (the period-n points are enumerated) or
    an already computed :class:`PeriodicPointSet`.
    """
    if isinstance(fmap_or_points, McMullenMap):
        if n is None:
            raise ConfigError("period n required when passing a map")
        points = enumerate_points(fmap_or_points, n, **enum_kw)
    else:
        points = fmap_or_points
        n = points.n
    ell = _log_multipliers(points)

    grid = np.linspace(D_LO, D_HI, 10)
    values = [float(np.sum(np.exp(-g * ell))) for g in grid]
    if not all(a > b for a, b in zip(values, values[1:])):
        raise RegimeError("S_n(D) is not strictly decreasing on the grid")

    D, lo, hi, res = _solve_moran(ell, tol)
    return DimensionEstimate(D, n, lo, hi, res, "bowen_fixed_n")


def extrapolate(ns: Sequence[int], Ds: Sequence[float], Q: int) -> tuple[float, np.ndarray, float]:
    """Least-squares fit ``D_n = D_inf + a/n + b Q**-n / n``.

    Returns ``(D_inf, coefficients, rms_residual)``.  The ``a/n`` term carries
    the bounded constant in the periodic-point sum; the ``Q**-n/n`` term is
    the leading geometric correction (exact at p = 0, where
    ``D_n = 1 + log(1 - Q**-n) / (n log Q)``).  With fewer than four periods
    only the ``a/n`` term is fitted.
    """
    n = np.asarray(ns, dtype=float)
    y = np.asarray(Ds, dtype=float)
    if len(n) < 2:
        raise DegenerateFitError("need at least two periods to extrapolate")
    cols = [np.ones_like(n), 1.0 / n]
    if len(n) >= 4:
        cols.append(float(Q) ** -n / n)
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return float(coef[0]), coef, rms


def solve_bowen_extrapolated(fmap: McMullenMap, n_min: int, n_max: int,
                             tol: float = 1e-13, **enum_kw) -> DimensionEstimate:
    """Solve at every period in ``[n_min, n_max]`` and extrapolate ``n -> inf``."""
    if n_min < 3:
        raise ConfigError("n_min must be >= 3")
    if n_max <= n_min:
        raise ConfigError("need n_max > n_min")
    ns = list(range(n_min, n_max + 1))
    fixed = [solve_bowen(fmap, n, tol=tol, **enum_kw) for n in ns]
    Ds = [e.D for e in fixed]
    D_inf, coef, rms = extrapolate(ns, Ds, fmap.Q)
    lo, hi = min(D_inf, Ds[-1]), max(D_inf, Ds[-1])
    return DimensionEstimate(D_inf, 0, lo, hi, rms, "bowen_extrapolated",
                             details={"n": ns, "D_n": Ds,
                                      "residuals": [e.residual for e in fixed],
                                      "coefficients": [float(c) for c in coef]})


def falconer_bound(ratios: ContractionRatios, which: str = "upper", tol: float = 1e-13) -> float:
    """Unique ``s`` with ``sum_i r_i**s = 1`` for the upper or lower ratios."""
    if which not in ("upper", "lower"):
        raise ConfigError("which must be 'upper' or 'lower'")
    r = np.asarray(ratios.upper if which == "upper" else ratios.lower)
    log_inv = -np.log(r)
    # sum r_i**s falls from m (s = 0) to 0, so [0, hi] brackets once hi is large enough
    hi = 1.0
    while math.fsum(np.exp(-hi * log_inv)) > 1.0:
        hi *= 2.0
    s, *_ = _solve_moran(log_inv, tol, 0.0, hi, polish=False)
    return s


def falconer_estimate(ratios: ContractionRatios, which: str, tol: float = 1e-13,
                      n: int = 0) -> DimensionEstimate:
    s = falconer_bound(ratios, which, tol)
    return DimensionEstimate(s, n, method=f"falconer_{which}")


def fit_quadratic_coefficient(ps: Iterable[complex], Ds: Iterable[float],
                              quartic: bool = False) -> tuple[float, float, float]:
    """Least-squares coefficient of ``|p|**2`` in ``D - 1``.

    With ``quartic=True`` the model is ``D - 1 = a |p|**2 + b |p|**4`` so
    that the next even-order term does not leak into ``a``.  Returns
    ``(a, b, rms)`` with ``b = 0`` for the pure quadratic model.
    """
    x = np.abs(np.asarray(list(ps), dtype=complex)) ** 2
    y = np.asarray(list(Ds), dtype=float) - 1.0
    if x.size == 0 or np.all(x == 0):
        raise DegenerateFitError("need at least one nonzero p")
    cols = [x, x**2] if quartic else [x]
    if quartic and len(np.unique(x)) < 2:
        raise DegenerateFitError("quartic model needs two distinct |p|")
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return float(coef[0]), float(coef[1]) if quartic else 0.0, rms
