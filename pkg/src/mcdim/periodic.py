"""Period-n points of f_p on the outer boundary curve.

At p = 0 the boundary is the unit circle and the period-n points are
``exp(2 pi i j / (Q**n - 1))``.  For small p each of them moves with p; the
moved point is the fixed point of the n-fold cycle of outer inverse branches
whose sheets are pinned by the unperturbed orbit.  That cycle is a
contraction (ratio about Q**-n), so plain fixed-point iteration converges.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import ConfigError, ConvergenceError, DuplicatePointError, RegimeError
from .mapcore import TAU, McMullenMap

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
DEFAULT_P_BOUND = 0.1
DEFAULT_CAP = 10**7
_POLISH_SWEEPS = 40

CSV_COLUMNS = ("j", "n", "t_num", "t_den", "z_re", "z_im",
               "mult_re", "mult_im", "log_abs_mult", "residual")


def default_workers() -> int:
    env = os.environ.get("MCDIM_WORKERS")
    if env:
        try:
            w = int(env)
        except ValueError:
            raise ConfigError(f"MCDIM_WORKERS must be an integer, got {env!r}") from None
        if w < 1:
            raise ConfigError("MCDIM_WORKERS must be >= 1")
        return w
    return os.cpu_count() or 1


@dataclass(frozen=True)
class BoundaryAngle:
    """The angle ``t_j = j / (Q**n - 1)``, a period-n point of ``t -> Q t mod 1``."""

    j: int
    n: int
    Q: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("period n must be >= 1")
        if not 0 <= self.j < self.denominator:
            raise ConfigError(f"j must lie in [0, {self.denominator - 1}], got {self.j}")

    @property
    def denominator(self) -> int:
        return self.Q**self.n - 1

    @property
    def t(self) -> Fraction:
        return Fraction(self.j, self.denominator)

    @property
    def value(self) -> float:
        return self.j / self.denominator

    def image(self) -> BoundaryAngle:
        """The angle ``Q t mod 1``."""
        return BoundaryAngle(self.Q * self.j % self.denominator, self.n, self.Q)

    def orbit_indices(self) -> list[int]:
        N = self.denominator
        return [self.j * pow(self.Q, m, N) % N for m in range(self.n)]


@dataclass(frozen=True)
class BoundaryPeriodicPoint:
    angle: BoundaryAngle
    z: complex
    multiplier: complex
    log_abs_multiplier: float
    residual: float


def _check_regime(fmap: McMullenMap, p_bound: float):
    if abs(fmap.p) > p_bound:
        raise RegimeError(f"|p| = {abs(fmap.p):.3g} exceeds the supported bound {p_bound}")


def locate(fmap: McMullenMap, angle: BoundaryAngle, tol: float = DEFAULT_TOL,
           max_iter: int = DEFAULT_MAX_ITER, p_bound: float = DEFAULT_P_BOUND
           ) -> BoundaryPeriodicPoint:
    """Locate the boundary point of period ``angle.n`` at angle ``angle``.

    Starting from ``exp(2 pi i t_j)``, the n inverse branches along the
    unperturbed orbit are applied (last one first) until two successive
    passes differ by less than ``tol``.
    """
    if angle.Q != fmap.Q:
        raise ConfigError("angle and map disagree on Q")
    if tol <= 0:
        raise ConfigError("tol must be positive")
    _check_regime(fmap, p_bound)
    N = angle.denominator
    hints = [complex(np.exp(1j * TAU * (k / N))) for k in angle.orbit_indices()]
    z = hints[0]
    for _ in range(max_iter):
        w = z
        for h in reversed(hints):
            w = fmap.outer_inverse_branch(w, h)
        step = abs(w - z)
        z = w
        if step < tol:
            break
    else:
        raise ConvergenceError(
            f"no convergence after {max_iter} passes at j={angle.j}, n={angle.n}; "
            "p is probably outside the Cantor-circle regime")
    orb = fmap.orbit_multiplier(z, angle.n)
    residual = abs(complex(fmap.iterate(z, angle.n)) - z)
    return BoundaryPeriodicPoint(angle, z, orb.multiplier, orb.log_abs, residual)


@dataclass
class PeriodicPointSet:
    """All ``Q**n - 1`` period-n points on the boundary curve, indexed by j.

    Stored column-wise; indexing or iterating yields
    :class:`BoundaryPeriodicPoint` records.
    """

    fmap: McMullenMap
    n: int
    z: np.ndarray
    multiplier: np.ndarray
    log_abs_multiplier: np.ndarray
    residual: np.ndarray
    iterations: int

    @property
    def Q(self) -> int:
        return self.fmap.Q

    @property
    def denominator(self) -> int:
        return self.Q**self.n - 1

    def __len__(self) -> int:
        return len(self.z)

    def __getitem__(self, j: int) -> BoundaryPeriodicPoint:
        j = range(len(self))[j]
        return BoundaryPeriodicPoint(
            BoundaryAngle(j, self.n, self.Q), complex(self.z[j]),
            complex(self.multiplier[j]), float(self.log_abs_multiplier[j]),
            float(self.residual[j]))

    def __iter__(self) -> Iterator[BoundaryPeriodicPoint]:
        for j in range(len(self)):
            yield self[j]

    @property
    def radial_constant(self) -> float:
        """Smallest C with ``| |z| - 1 | <= C |p|`` over the set (0 when p = 0)."""
        if self.fmap.p == 0:
            return 0.0
        return float(np.max(np.abs(np.abs(self.z) - 1.0)) / abs(self.fmap.p))

    def forward_closure_error(self) -> float:
        """max_j |f(z_j) - z_(Qj mod N)|."""
        N = self.denominator
        nxt = np.arange(N, dtype=np.int64) * self.Q % N
        return float(np.max(np.abs(self.fmap(self.z) - self.z[nxt])))

    def to_csv(self, path) -> None:
        N = self.denominator
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for j in range(N):
                t = Fraction(j, N)
                m = self.multiplier[j]
                writer.writerow([j, self.n, t.numerator, t.denominator,
                                 repr(float(self.z[j].real)), repr(float(self.z[j].imag)),
                                 repr(float(m.real)), repr(float(m.imag)),
                                 repr(float(self.log_abs_multiplier[j])),
                                 repr(float(self.residual[j]))])


def _chunks(N: int, workers: int) -> list[slice]:
    size = max(1, -(-N // workers))
    return [slice(a, min(a + size, N)) for a in range(0, N, size)]


def enumerate_points(fmap: McMullenMap, n: int, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER, cap: int = DEFAULT_CAP,
                     p_bound: float = DEFAULT_P_BOUND, workers: int | None = None
                     ) -> PeriodicPointSet:
    """Locate every period-n point on the boundary curve at once.

    All cycles are iterated together: one sweep replaces ``z_j`` by the
    outer preimage of ``z_(Qj mod N)`` on the sheet nearest
    ``exp(2 pi i t_j)``.  The sweep has the same fixed points as the
    per-angle cycle in :func:`locate` and contracts by about ``1/Q`` each
    time.  The index range is split across ``workers`` threads; every entry
    is computed independently, so the result does not depend on the split.

    Once a sweep moves no point by more than ``tol``, further sweeps run
    until the step stops shrinking, so the points are accurate to rounding
    level and ``|f^n(z) - z|`` is limited only by forward evaluation
    (about ``Q**n * eps``).
    """
    if n < 1:
        raise ConfigError("period n must be >= 1")
    if tol <= 0:
        raise ConfigError("tol must be positive")
    Q = fmap.Q
    N = Q**n - 1
    if N > cap:
        raise ConfigError(f"Q**n - 1 = {N} exceeds the cap {cap}")
    _check_regime(fmap, p_bound)
    workers = workers or default_workers()

    j = np.arange(N, dtype=np.int64)
    hint = np.exp(1j * TAU * (j / N))
    nxt = j * Q % N
    z = hint.copy()
    parts = _chunks(N, workers)

    def sweep(sl, src, dst):
        dst[sl] = fmap.outer_inverse(src[nxt[sl]], hint[sl])
        return float(np.max(np.abs(dst[sl] - src[sl])))

    new = np.empty_like(z)
    floor = 8 * np.finfo(float).eps
    with ThreadPoolExecutor(max_workers=workers) as pool:
        run = (lambda: sweep(parts[0], z, new)) if len(parts) == 1 else \
            (lambda: max(pool.map(lambda sl: sweep(sl, z, new), parts)))
        for it in range(1, max_iter + 1):
            step = run()
            z, new = new, z
            if step < tol:
                break
        else:
            raise ConvergenceError(
                f"no convergence after {max_iter} sweeps (Q={Q}, n={n}, p={fmap.p}); "
                "p is probably outside the Cantor-circle regime")
        # polish down to rounding level: f^n amplifies any leftover error by ~Q**n
        for _ in range(_POLISH_SWEEPS):
            if step <= floor:
                break
            prev, step = step, run()
            z, new = new, z
            it += 1
            if step >= prev:
                break

    d = fmap.derivative(z)
    absd = np.abs(d)
    ell = np.log(absd)
    unit = d / absd
    log_mult = np.zeros(N)
    phase = np.ones(N, dtype=complex)
    idx = j.copy()
    w = z
    for _ in range(n):
        log_mult += ell[idx]
        phase *= unit[idx]
        idx = idx * Q % N
        w = fmap(w)
    phase /= np.abs(phase)
    residual = np.abs(w - z)
    if np.any(log_mult <= 0):
        raise RegimeError("found a non-repelling cycle on the boundary curve")

    # the points are in cyclic order along the curve, so the closest pair
    # is a consecutive one
    if N > 1:
        gaps = np.abs(np.diff(np.concatenate([z, z[:1]])))
        if np.min(gaps) <= 10 * tol:
            k = int(np.argmin(gaps))
            raise DuplicatePointError(
                f"points j={k} and j={(k + 1) % N} coincide; "
                "the boundary is no longer a Jordan curve at this p")

    return PeriodicPointSet(fmap, n, z, np.exp(log_mult) * phase, log_mult, residual, it)


def motion_lipschitz(Q: int, p1: complex, p2: complex, n: int, **kw) -> float:
    """max_j |z_j(p1) - z_j(p2)| / |p1 - p2|, a finite-difference bound on how
    fast the period-n points move with the parameter."""
    if p1 == p2:
        raise ConfigError("p1 and p2 must differ")
    a = enumerate_points(McMullenMap(Q, p1), n, **kw)
    b = enumerate_points(McMullenMap(Q, p2), n, **kw)
    return float(np.max(np.abs(a.z - b.z)) / abs(p1 - p2))
