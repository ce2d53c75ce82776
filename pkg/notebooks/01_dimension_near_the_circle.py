# %% [markdown]
# # Dimension of the outer boundary for small p
#
# For `f_p(z) = z**Q + p / z**Q` with small `p`, the outer boundary of the
# basin of infinity is a slightly wobbly circle. Its Hausdorff dimension
# exceeds 1 by roughly `|p|**2 / log Q`. This script measures that excess
# with the periodic-point (Bowen) solver and compares it with the series
# prediction.

# %%
from __future__ import annotations

import math

import numpy as np

from mcdim import McMullenMap, enumerate_points, predict_dimension, solve_bowen, solve_bowen_extrapolated
from mcdim.bowen import fit_quadratic_coefficient

# %% [markdown]
# ## Period-n points
#
# The period-n points on the curve are indexed by the angles `j / (Q**n - 1)`.
# At `p = 0` they are roots of unity and every multiplier has modulus `Q**n`.

# %%
f = McMullenMap(3, 0.05)
pts = enumerate_points(f, 6)
print(len(pts), "points; radial spread", np.ptp(np.abs(pts.z)))
print("log multipliers range", pts.log_abs_multiplier.min(), pts.log_abs_multiplier.max())

# %% [markdown]
# ## Fixed-n estimates and extrapolation
#
# `D_n` converges like `1/n`, so the estimates for a range of periods are
# extrapolated to `n -> infinity`.

# %%
for n in range(6, 11):
    print(n, solve_bowen(f, n).D)
est = solve_bowen_extrapolated(f, 6, 12)
print("extrapolated", est.D, "series prediction", predict_dimension(f.Q, f.p).D)

# %% [markdown]
# ## The quadratic coefficient
#
# Fit `D - 1` against `|p|**2` over a few parameters. The quartic fit absorbs
# the next-order term, which differs between real and imaginary `p`.

# %%
ps = [0.02, 0.03, 0.04, 0.05]
for label, seq in (("real", ps), ("imaginary", [1j * p for p in ps])):
    Ds = [solve_bowen_extrapolated(McMullenMap(3, p), 6, 11).D for p in seq]
    a, _, _ = fit_quadratic_coefficient(seq, Ds)
    aq, b, _ = fit_quadratic_coefficient(seq, Ds, quartic=True)
    print(f"{label:9s} a={a:.5f} quartic a={aq:.5f} b={b:.2f} target={1 / math.log(3):.5f}")
