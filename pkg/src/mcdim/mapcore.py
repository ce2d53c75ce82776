"""The McMullen family f_p(z) = z**Q + p / z**Q.

Everything here accepts either Python complex scalars or numpy arrays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AmbiguousRootError, BranchPointError, ConfigError, PoleError

TAU = 2.0 * math.pi

# relative slack for deciding that a point sits on a branch cut / tie
_TIE_TOL = 1e-12


def ipow(z, q: int):
    """z**q for an integer q >= 1, by repeated squaring.

    Used instead of ``**`` so that scalar and array paths round identically and
    conjugation commutes with the power bit-for-bit.
    """
    result = None
    base = z
    while q:
        if q & 1:
            result = base if result is None else result * base
        q >>= 1
        if q:
            base = base * base
    return result


class OrbitMultiplier(NamedTuple):
    points: np.ndarray
    multiplier: complex
    log_abs: float


@dataclass(frozen=True)
class McMullenMap:
    """The rational map ``z -> z**Q + p / z**Q``.

    Parameters
    ----------
    Q : int
        Degree parameter, at least 3.
    p : complex
        Perturbation parameter; ``p = 0`` gives the power map ``z**Q``.
    """

    Q: int
    p: complex = 0j

    def __post_init__(self):
        if int(self.Q) != self.Q or self.Q < 3:
            raise ConfigError(f"Q must be an integer >= 3, got {self.Q!r}")
        object.__setattr__(self, "Q", int(self.Q))
        object.__setattr__(self, "p", complex(self.p))

    def _check_pole(self, z):
        if self.p != 0 and np.any(np.asarray(z) == 0):
            raise PoleError("z = 0 is a pole of f_p for p != 0")

    def __call__(self, z):
        self._check_pole(z)
        if self.p == 0:
            return ipow(z, self.Q)
        zq = ipow(z, self.Q)
        return zq + self.p / zq

    def derivative(self, z):
        """f_p'(z) = Q (z**(Q-1) - p / z**(Q+1))."""
        self._check_pole(z)
        zq1 = ipow(z, self.Q - 1)
        if self.p == 0:
            return self.Q * zq1
        return self.Q * (zq1 - self.p / (zq1 * z * z))

    def iterate(self, z, n: int):
        for _ in range(n):
            z = self(z)
        return z

    def orbit_multiplier(self, z0: complex, n: int) -> OrbitMultiplier:
        """Orbit ``z0, ..., f^(n-1)(z0)`` and the multiplier ``(f^n)'(z0)``.

        The modulus of the multiplier is accumulated as a sum of logarithms
        so that long orbits do not overflow; the returned complex multiplier is
        rebuilt from that modulus and the accumulated phase.
        """
        pts = np.empty(n, dtype=complex)
        log_abs = 0.0
        phase = 1.0 + 0.0j
        z = complex(z0)
        for m in range(n):
            pts[m] = z
            d = complex(self.derivative(z))
            a = abs(d)
            if a == 0.0:
                raise PoleError(f"critical point on the orbit at step {m}")
            log_abs += math.log(a)
            phase *= d / a
            z = complex(self(z))
        phase /= abs(phase)
        return OrbitMultiplier(pts, math.exp(log_abs) * phase, log_abs)

    def outer_root(self, w):
        """Root of ``X**2 - w X + p`` of larger modulus (array-safe)."""
        s = np.sqrt(w * w - 4.0 * self.p)
        plus = w + s
        minus = w - s
        return np.where(np.abs(plus) >= np.abs(minus), plus, minus) * 0.5

    def outer_inverse(self, w, hint):
        """Vectorized outer inverse branch, no error checking.

        For roots of equal modulus, nearest in the plane and nearest in
        argument pick the same candidate, so the sheet index is found from
        the argument difference directly.
        """
        x = self.outer_root(np.asarray(w, dtype=complex))
        r = x ** (1.0 / self.Q)
        k = np.rint((np.angle(hint) - np.angle(r)) * (self.Q / TAU))
        return r * np.exp(1j * (TAU / self.Q) * k)

    def outer_inverse_branch(self, w: complex, hint: complex) -> complex:
        """Preimage of ``w`` on the outer sheet nearest to ``hint``.

        ``z**Q`` is taken as the larger-modulus root of ``X**2 - w X + p``
        (the sheet that reduces to ``z**Q = w`` at p = 0), and ``z`` is the
        Q-th root of that value closest to ``hint``.
        """
        w = complex(w)
        hint = complex(hint)
        if hint == 0:
            raise ConfigError("hint must be nonzero")
        disc = w * w - 4.0 * self.p
        if abs(disc) <= _TIE_TOL * max(1.0, abs(w) ** 2):
            raise BranchPointError(f"w = {w!r} is a critical value (w^2 = 4p)")
        s = cmath.sqrt(disc)
        x1, x2 = (w + s) / 2.0, (w - s) / 2.0
        if abs(x1) > abs(x2):
            x = x1
        elif abs(x2) > abs(x1):
            x = x2
        else:
            x = x1 if abs(x1 - w) <= abs(x2 - w) else x2
        if x == 0:
            raise BranchPointError("degenerate quadratic root X = 0")
        r = cmath.exp(cmath.log(x) / self.Q)
        cands = [r * cmath.exp(1j * TAU * k / self.Q) for k in range(self.Q)]
        dist = sorted((abs(c - hint), i) for i, c in enumerate(cands))
        if dist[1][0] - dist[0][0] <= _TIE_TOL * max(1.0, abs(hint)):
            raise AmbiguousRootError(f"hint {hint!r} is equidistant from two preimages")
        return cands[dist[0][1]]
