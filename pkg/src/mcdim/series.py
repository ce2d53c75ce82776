"""Small-p expansion of the boundary curve and the averages built on it.

The boundary point at angle t is ``z(t) = e(t) (1 + p U1(t) + p**2 U2(t) + ...)``
with ``e(t) = exp(2 pi i t)``, where U1 and U2 are lacunary series in the
phases ``exp(-2 pi i Q**k t)``.  Every series here is truncated at a finite
depth carried by :class:`TruncatedSeries`.

Angles can be given as

* floats or float arrays (the phases ``Q**k t mod 1`` are then generated by
  repeated multiplication, whose rounding error is damped by the ``Q**-k``
  weights),
* an :class:`AngleGrid` of exact rationals ``j / N`` (phases computed in
  integer arithmetic), or
* an ``mpmath.mpf`` scalar, in which case the whole evaluation runs in
  mpmath at the current working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .bowen import DimensionEstimate
from .errors import ConfigError
from .mapcore import McMullenMap

DEFAULT_DEPTH = 40
AVERAGE_CAP = 10**7


@dataclass(frozen=True)
class TruncatedSeries:
    """Truncation depths: ``L`` for single sums, ``L2`` for the l1/l2 sums in U2."""

    L: int = DEFAULT_DEPTH
    L2: int = DEFAULT_DEPTH

    def __post_init__(self):
        if self.L < 1 or self.L2 < 1:
            raise ConfigError("truncation depths must be >= 1")

    def phi_tail(self, Q: int) -> float:
        """Bound on |phi - phi_truncated|: ``Q**-L / (Q - 1)``."""
        return float(Q) ** -self.L / (Q - 1)

    def u2_tail(self, Q: int) -> float:
        """Bound on |U2 - U2_truncated| from |phi| <= 1/(Q-1) and geometric tails."""
        return (2.0 * float(Q) ** (1 - self.L2) + 1.5 * float(Q) ** (1 - self.L)) / (Q - 1) ** 2


DEFAULT_TRUNC = TruncatedSeries()


@dataclass(frozen=True)
class AngleGrid:
    """Exact rational angles ``num / N``."""

    num: np.ndarray
    N: int

    @classmethod
    def periodic(cls, n: int, Q: int, cap: int = AVERAGE_CAP) -> AngleGrid:
        """All angles ``j / (Q**n - 1)``, ``j = 0 .. Q**n - 2``."""
        N = Q**n - 1
        if N > cap:
            raise ConfigError(f"Q**n - 1 = {N} exceeds the cap {cap}")
        return cls(np.arange(N, dtype=np.int64), N)

    def __len__(self) -> int:
        return len(self.num)

    def scaled(self, c: int) -> AngleGrid:
        return AngleGrid(self.num * (c % self.N) % self.N, self.N)

    def values(self) -> np.ndarray:
        return self.num / self.N


# -- backends ---------------------------------------------------------------

def _is_mp(t) -> bool:
    return isinstance(t, (mpmath.mpf, mpmath.mpc))


def _e_minus(x, mp: bool):
    """exp(-2 pi i x)."""
    return mpmath.expjpi(-2 * x) if mp else np.exp(-2j * np.pi * x)


def _e_plus(t):
    if isinstance(t, AngleGrid):
        return np.exp(2j * np.pi * t.values())
    if _is_mp(t):
        return mpmath.expjpi(2 * t)
    return np.exp(2j * np.pi * np.asarray(t, dtype=float))


def _inv_pows(Q: int, count: int, mp: bool):
    if mp:
        q = mpmath.mpf(Q)
        return [q ** -k for k in range(count)]
    return [float(Q) ** -k for k in range(count)]


def _phases(t, scale: int, Q: int, count: int):
    """``[exp(-2 pi i scale Q**k t) for k in range(count)]``."""
    if isinstance(t, AngleGrid):
        num = t.num * (scale % t.N) % t.N
        out = []
        for _ in range(count):
            out.append(np.exp(-2j * np.pi * (num / t.N)))
            num = num * Q % t.N
        return out
    mp = _is_mp(t)
    if mp:
        x = mpmath.frac(scale * t)
        frac = mpmath.frac
    else:
        x = np.mod(scale * np.asarray(t, dtype=float), 1.0)
        frac = lambda y: np.mod(y, 1.0)
    out = []
    for _ in range(count):
        out.append(_e_minus(x, mp))
        x = frac(Q * x)
    return out


def _scaled_angle(t, c: int):
    """``c t`` reduced mod 1, exactly where the representation allows."""
    if isinstance(t, AngleGrid):
        return t.scaled(c)
    if _is_mp(t):
        return mpmath.frac(c * t)
    return np.mod(c * np.asarray(t, dtype=float), 1.0)


def _orbit_angle(t, Q: int, m: int):
    """``Q**m t mod 1`` by m exact-or-rounded multiplications."""
    for _ in range(m):
        t = _scaled_angle(t, Q)
    return t


# -- the series -------------------------------------------------------------

def _phi_scaled(t, scale: int, Q: int, trunc: TruncatedSeries):
    """``phi(scale * t)``."""
    mp = _is_mp(t)
    E = _phases(t, scale, Q, trunc.L)
    w = _inv_pows(Q, trunc.L, mp)
    acc = 0
    for k in reversed(range(trunc.L)):
        acc = acc + w[k] * E[k]
    return -acc / Q


def phi(t, Q: int, trunc: TruncatedSeries = DEFAULT_TRUNC):
    """``phi(t) = -(1/Q) sum_{l<L} Q**-l exp(-2 pi i Q**l t)``.

    Solves ``phi(Q t) - Q phi(t) = exp(-2 pi i t)`` up to a residual of
    modulus ``Q**-L``; ``phi(0) -> -1/(Q-1)``.
    """
    return _phi_scaled(t, 1, Q, trunc)


def U1(t, Q: int, trunc: TruncatedSeries = DEFAULT_TRUNC):
    """First-order coefficient ``U1(t) = phi(2 Q t)``."""
    return _phi_scaled(t, 2 * Q, Q, trunc)


def U2(t, Q: int, trunc: TruncatedSeries = DEFAULT_TRUNC):
    """Second-order coefficient of the boundary expansion.

    The defining double sum over ``l1, l2 >= 1`` of
    ``Q**-(l1+l2) phi(2 (Q**l1 + Q**l2) t)`` factorizes after expanding phi:
    with ``E_k = exp(-2 pi i 2 Q**k t)`` and
    ``F_l = sum_{i=1..L2} Q**-i E_(l+i)`` it equals
    ``-(1/Q) sum_l Q**-l F_l**2``, and the single sum becomes
    ``-(1/Q) sum_l Q**-l E_(l+1) F_l``.  This is the same finite sum, in
    O(L) instead of O(L * L2**2) operations.
    """
    L, L2 = trunc.L, trunc.L2
    mp = _is_mp(t)
    E = _phases(t, 2, Q, L + L2 + 1)
    w = _inv_pows(Q, L2 + 2, mp)
    # F_l = (E_(l+1) + F_(l+1)) / Q - Q**-(L2+1) E_(l+1+L2), run downwards from F_L
    F = 0
    for i in range(1, L2 + 1):
        F = F + w[i] * E[L + i]
    part1 = 0
    part2 = 0
    wl = _inv_pows(Q, L, mp)
    for l in reversed(range(L)):
        F = w[1] * (E[l + 1] + F) - w[L2 + 1] * E[l + 1 + L2]
        part1 = part1 + wl[l] * F * F
        part2 = part2 + wl[l] * E[l + 1] * F
    return -(Q - 1) * part1 / 2 - part2


def boundary_series(t, fmap: McMullenMap, trunc: TruncatedSeries = DEFAULT_TRUNC):
    """Second-order prediction ``e(t) (1 + p U1(t) + p**2 U2(t))`` of the boundary point."""
    p = fmap.p
    if _is_mp(t):
        p = mpmath.mpc(p)
    return _e_plus(t) * (1 + p * U1(t, fmap.Q, trunc) + p * p * U2(t, fmap.Q, trunc))


def predict_dimension(Q: int, p: complex) -> DimensionEstimate:
    """Leading-order dimension ``1 + |p|**2 / log Q``."""
    if Q < 3:
        raise ConfigError("Q must be >= 3")
    return DimensionEstimate(1.0 + abs(p) ** 2 / math.log(Q), method="series_prediction")


# -- averages over the period-n angles ---------------------------------------

def _fmean(values) -> complex:
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag)) / v.size


def average(G: Callable, n: int, Q: int, exact: bool = False, cap: int = AVERAGE_CAP) -> complex:
    """Mean of ``G(t)`` over ``t_j = j / (Q**n - 1)``, ``j = 0 .. Q**n - 2``.

    ``G`` receives a float array of the angles, or the :class:`AngleGrid`
    itself when ``exact`` is set.
    """
    grid = AngleGrid.periodic(n, Q, cap)
    vals = G(grid if exact else grid.values())
    return _fmean(np.broadcast_to(vals, (len(grid),)))


def A_term(t, m: int, Q: int, trunc: TruncatedSeries = DEFAULT_TRUNC):
    """``A_m(t) = (Q-1) U1(Q**m t) - exp(-2 pi i 2 Q**(m+1) t)``."""
    if m < 0:
        raise ConfigError("m must be >= 0")
    tm = _orbit_angle(t, Q, m)
    sig = _phases(tm, 2 * Q, Q, 1)[0]
    return (Q - 1) * U1(tm, Q, trunc) - sig


def B_term(t, m: int, Q: int, D: float, trunc: TruncatedSeries = DEFAULT_TRUNC):
    """Second-order coefficient ``B_m`` in the expansion of
    ``|z_m**(Q-1) - p / z_m**(Q+1)|**(-D/2)``."""
    if m < 0:
        raise ConfigError("m must be >= 0")
    tm = _orbit_angle(t, Q, m)
    s2, s4 = _phases(tm, 2 * Q, Q, 1)[0], _phases(tm, 4 * Q, Q, 1)[0]
    u1 = U1(tm, Q, trunc)
    u2 = U2(tm, Q, trunc)
    return ((Q - 1) * (D * (Q - 1) + 2) * u1 * u1
            - 2 * (D * (Q - 1) + 4 * Q) * s2 * u1
            - 4 * (Q - 1) * u2
            + (D + 2) * s4)


def sum_AmAk(n: int, Q: int, trunc: TruncatedSeries = DEFAULT_TRUNC, cap: int = AVERAGE_CAP) -> float:
    """``sum_{m,k<n} <A_m conj(A_k)>_n`` by direct averaging over all angles.

    Since ``A_m(t_j) = A_0(t_(Q**m j mod N))``, the double sum is the mean of
    ``|sum_m A_0(t_(Q**m j))|**2``.
    """
    grid = AngleGrid.periodic(n, Q, cap)
    N = grid.N
    a0 = A_term(grid, 0, Q, trunc)
    idx = grid.num.copy()
    tot = np.zeros(N, dtype=complex)
    for _ in range(n):
        tot += a0[idx]
        idx = idx * Q % N
    return math.fsum(np.abs(tot) ** 2) / N


# -- exact integer predicates ------------------------------------------------

def _check_ints(n: int, Q: int, *nonneg: int):
    if n < 1 or Q < 3 or any(x < 0 for x in nonneg):
        raise ConfigError("need n >= 1, Q >= 3 and non-negative exponents")


def divisibility_2Qv(v: int, n: int, Q: int) -> bool:
    """Whether ``2 Q**v / (Q**n - 1)`` is an integer."""
    _check_ints(n, Q, v)
    N = Q**n - 1
    return 2 * pow(Q, v, N) % N == 0


def divisibility_2Qv_u(u: int, v: int, n: int, Q: int) -> bool:
    """Whether ``2 Q**v (Q**u + 1) / (Q**n - 1)`` is an integer."""
    _check_ints(n, Q, u, v)
    N = Q**n - 1
    return 2 * pow(Q, v, N) * (pow(Q, u, N) + 1) % N == 0


def divisibility_geometric(u: int, n: int, Q: int) -> bool:
    """Whether ``(Q**u - 1) / (Q**n - 1)`` is an integer (true iff n divides u)."""
    _check_ints(n, Q, u)
    N = Q**n - 1
    return (pow(Q, u, N) - 1) % N == 0


def character_average(m: int, n: int, Q: int) -> int:
    """Exact value of ``<exp(2 pi i m t)>_n``: 1 if ``Q**n - 1`` divides m, else 0."""
    return int(m % (Q**n - 1) == 0)


def triangle_sum(n: int, Q: int, strict: bool = False) -> float:
    """``sum_{m<n} sum_{k<=m} Q**-(m-k)`` (``k < m`` when ``strict``), summed term by term."""
    return math.fsum(float(Q) ** -(m - k) for m in range(n)
                     for k in range(m if strict else m + 1))


def triangle_sum_closed(n: int, Q: int, strict: bool = False) -> float:
    """Closed form of :func:`triangle_sum`: ``n Q/(Q-1)`` (or ``n/(Q-1)``)
    minus ``(Q - Q**-(n-1)) / (Q-1)**2``."""
    lead = n / (Q - 1) if strict else n * Q / (Q - 1)
    return lead - (Q - float(Q) ** -(n - 1)) / (Q - 1) ** 2
